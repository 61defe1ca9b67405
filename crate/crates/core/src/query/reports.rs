//! Review-analysis reports. Each one can be computed from an extracted
//! graph or straight from the identified article, and both must agree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::model::IdentifiedArticle;
use crate::rdf::vocab::{DCTERMS_CREATOR, DOCO_SECTION, OA_ANNOTATION, OA_HAS_SOURCE, OA_HAS_TARGET, SCHEMA_IS_PART_OF};
use crate::rdf::{Graph, Iri, Term};

/// Label used in the reviewer/section matrix for blocks before the first
/// heading.
pub const NO_SECTION: &str = "(none)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportKind {
    CommentsPerSection,
    CommonTargets,
    ReviewerSectionMatrix,
}

impl ReportKind {
    pub const ALL: [ReportKind; 3] =
        [ReportKind::CommentsPerSection, ReportKind::CommonTargets, ReportKind::ReviewerSectionMatrix];

    pub fn name(self) -> &'static str {
        match self {
            ReportKind::CommentsPerSection => "comments_per_section",
            ReportKind::CommonTargets => "common_targets",
            ReportKind::ReviewerSectionMatrix => "reviewer_section_matrix",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            ReportKind::CommentsPerSection => &["section", "comments"],
            ReportKind::CommonTargets => &["block", "comments"],
            ReportKind::ReviewerSectionMatrix => &["reviewer", "section", "comments"],
        }
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.replace('-', "_");
        ReportKind::ALL
            .into_iter()
            .find(|k| k.name() == wanted)
            .ok_or_else(|| format!("unknown report kind {s:?} (expected comments_per_section, common_targets or reviewer_section_matrix)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReportRow {
    pub labels: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub kind: ReportKind,
    pub rows: Vec<ReportRow>,
}

/// One annotation reduced to what the reports need: reviewer, target block
/// id and the id of the section the target lies in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Observation {
    reviewer: String,
    block: String,
    section: Option<String>,
}

impl Report {
    pub fn from_graph(kind: ReportKind, g: &Graph) -> Report {
        let section_class = Iri::new(DOCO_SECTION);
        let annotation_class = Iri::new(OA_ANNOTATION);
        let sections: BTreeSet<&Iri> = g.subjects_of_type(&section_class).collect();
        let is_part_of = Iri::new(SCHEMA_IS_PART_OF);
        let section_of = |block: &Iri| -> Option<String> {
            if sections.contains(block) {
                return Some(label(block));
            }
            g.objects(block, &is_part_of)
                .filter_map(Term::as_iri)
                .find(|parent| sections.contains(parent))
                .map(label)
        };
        let (creator, has_target, has_source) = (Iri::new(DCTERMS_CREATOR), Iri::new(OA_HAS_TARGET), Iri::new(OA_HAS_SOURCE));
        let mut observations = Vec::new();
        for annotation in g.subjects_of_type(&annotation_class) {
            let blocks: Vec<&Iri> = g
                .objects(annotation, &has_target)
                .filter_map(Term::as_iri)
                .flat_map(|target| g.objects(target, &has_source).filter_map(Term::as_iri))
                .collect();
            for reviewer in g.objects(annotation, &creator).filter_map(Term::as_literal) {
                for block in &blocks {
                    observations.push(Observation {
                        reviewer: reviewer.lexical.clone(),
                        block: label(block),
                        section: section_of(block),
                    });
                }
            }
        }
        let all_sections = sections.into_iter().map(label).collect();
        Report::from_observations(kind, all_sections, observations)
    }

    pub fn from_article(kind: ReportKind, article: &IdentifiedArticle) -> Report {
        let enclosing = article.enclosing_sections();
        let all_sections = (0..article.blocks.len())
            .filter(|&i| article.blocks[i].heading_level().is_some())
            .map(|i| article.block_ids[i].clone())
            .collect();
        let observations = article
            .comments
            .iter()
            .map(|c| Observation {
                reviewer: c.comment.author_name.clone(),
                block: article.block_ids[c.block].clone(),
                section: enclosing[c.block].map(|s| article.block_ids[s].clone()),
            })
            .collect();
        Report::from_observations(kind, all_sections, observations)
    }

    fn from_observations(kind: ReportKind, all_sections: BTreeSet<String>, observations: Vec<Observation>) -> Report {
        let mut rows: Vec<ReportRow> = match kind {
            ReportKind::CommentsPerSection => {
                let mut counts: BTreeMap<String, usize> = all_sections.into_iter().map(|s| (s, 0)).collect();
                for section in observations.iter().filter_map(|o| o.section.as_ref()) {
                    *counts.entry(section.clone()).or_default() += 1;
                }
                counts.into_iter().map(|(s, count)| ReportRow { labels: vec![s], count }).collect()
            }
            ReportKind::CommonTargets => {
                let reviewers: BTreeSet<&str> = observations.iter().map(|o| o.reviewer.as_str()).collect();
                let mut by_block: BTreeMap<&str, (BTreeSet<&str>, usize)> = BTreeMap::new();
                for o in &observations {
                    let entry = by_block.entry(&o.block).or_default();
                    entry.0.insert(&o.reviewer);
                    entry.1 += 1;
                }
                by_block
                    .into_iter()
                    .filter(|(_, (who, _))| *who == reviewers)
                    .map(|(block, (_, count))| ReportRow { labels: vec![block.to_string()], count })
                    .collect()
            }
            ReportKind::ReviewerSectionMatrix => {
                let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
                for o in observations {
                    let section = o.section.unwrap_or_else(|| NO_SECTION.to_string());
                    *counts.entry((o.reviewer, section)).or_default() += 1;
                }
                counts.into_iter().map(|((r, s), count)| ReportRow { labels: vec![r, s], count }).collect()
            }
        };
        if kind == ReportKind::CommentsPerSection {
            rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.labels.cmp(&b.labels)));
        } else {
            rows.sort();
        }
        Report { kind, rows }
    }

    /// Header line then one line per row; tabs and newlines inside labels
    /// are replaced by spaces.
    pub fn to_tsv(&self) -> String {
        let mut out = self.kind.header().join("\t");
        out.push('\n');
        for row in &self.rows {
            for l in &row.labels {
                out.push_str(&l.replace(['\t', '\n', '\r'], " "));
                out.push('\t');
            }
            out.push_str(&row.count.to_string());
            out.push('\n');
        }
        out
    }
}

fn label(iri: &Iri) -> String {
    iri.fragment().unwrap_or(iri.as_str()).to_string()
}

pub fn report_comments_per_section(g: &Graph) -> Report {
    Report::from_graph(ReportKind::CommentsPerSection, g)
}

pub fn report_common_targets(g: &Graph) -> Report {
    Report::from_graph(ReportKind::CommonTargets, g)
}

pub fn report_reviewer_section_matrix(g: &Graph) -> Report {
    Report::from_graph(ReportKind::ReviewerSectionMatrix, g)
}
