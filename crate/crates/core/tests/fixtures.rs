use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use arann_core::discourse::{classify_heading, classify_units, DiscourseClass, Gazetteer};
use arann_core::html::{generate_html, Element, HtmlDocument};
use arann_core::ingest::{load_bundle, media_from, parse_bundle, write_bundle};
use arann_core::model::{assign_identifiers, ArticleBundle};
use arann_core::pipeline::publish;
use arann_core::query::{Report, ReportKind, NO_SECTION};
use arann_core::rdf::vocab::{OA_ANNOTATION, OA_END, OA_EXACT, OA_HAS_SELECTOR, OA_HAS_SOURCE, OA_HAS_TARGET, OA_START};
use arann_core::rdf::{direct_triples, extract_rdfa, Graph, Iri, Term};
use serde_json::Value;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
}

fn fixtures() -> Vec<(String, ArticleBundle)> {
    fixture_paths()
        .into_iter()
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), load_bundle(&p).unwrap()))
        .collect()
}

#[test]
fn corpus_covers_the_required_cases() {
    let all = fixtures();
    assert!(all.len() >= 10);
    for name in ["zero-comments", "overlapping-anchors", "duplicate-headings", "non-ascii", "sample-article"] {
        assert!(all.iter().any(|(n, _)| n == name), "missing fixture {name}");
    }
}

#[test]
fn sample_article_counts_match_raw_json() {
    let path = fixtures_dir().join("sample-article.json");
    let raw: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let kinds: Vec<&str> = raw["blocks"].as_array().unwrap().iter().map(|b| b["kind"].as_str().unwrap()).collect();
    let count = |k: &str| kinds.iter().filter(|x| **x == k).count();
    assert_eq!((count("heading"), count("paragraph"), count("figure")), (3, 5, 1));
    assert_eq!(raw["comments"].as_array().unwrap().len(), 2);

    let bundle = load_bundle(&path).unwrap();
    let kinds_model: Vec<&str> = bundle.blocks.iter().map(|b| b.kind_name()).collect();
    assert_eq!(kinds_model, kinds);
    assert_eq!(bundle.comments.len(), 2);
    assert_eq!(bundle.media.len(), 1);
}

#[test]
fn write_then_parse_is_identity_on_fixtures() {
    for (name, bundle) in fixtures() {
        let text = write_bundle(&bundle);
        let again = parse_bundle(&text, &media_from(&bundle)).unwrap();
        assert_eq!(again, bundle, "{name}");
        assert_eq!(write_bundle(&again), text, "{name}");
    }
}

#[test]
fn fixtures_round_trip_through_html() {
    let gaz = Gazetteer::bundled();
    for (name, bundle) in fixtures() {
        let article = classify_units(assign_identifiers(&bundle).unwrap(), &gaz);
        let html = generate_html(&article).to_html();
        let extracted = extract_rdfa(&HtmlDocument::parse(&html).unwrap()).unwrap();
        assert_eq!(extracted, direct_triples(&article), "{name}");
        assert!(publish(&bundle, &gaz).is_ok(), "{name}");
    }
}

#[test]
fn golden_html_is_byte_stable() {
    let gaz = Gazetteer::bundled();
    let golden_dir = fixtures_dir().join("golden");
    let mut checked = 0;
    for entry in fs::read_dir(&golden_dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let bundle = load_bundle(&fixtures_dir().join(format!("{name}.json"))).unwrap();
        let first = publish(&bundle, &gaz).unwrap().html_text;
        let second = publish(&bundle, &gaz).unwrap().html_text;
        assert_eq!(first, second, "{name}");
        assert_eq!(first, fs::read_to_string(&path).unwrap(), "{name} differs from golden file");
        checked += 1;
    }
    assert!(checked >= 3);
}

/// Text of a block as a reader sees it, gathered without the library's own
/// text-container logic.
fn visible_block_text(block: &Element) -> String {
    match block.name.as_str() {
        "section" => block
            .child_elements()
            .find(|c| c.name.len() == 2 && c.name.starts_with('h'))
            .map(Element::text_content)
            .unwrap_or_default(),
        "figure" => block.child_elements().filter(|c| c.name == "figcaption").map(Element::text_content).collect(),
        _ => block.text_content(),
    }
}

fn single(g: &Graph, s: &Iri, p: &str) -> Term {
    let p = Iri::new(p);
    let objects: Vec<Term> = g.objects(s, &p).cloned().collect();
    assert_eq!(objects.len(), 1, "{s} {p}");
    objects[0].clone()
}

#[test]
fn quote_selectors_match_position_selectors() {
    let gaz = Gazetteer::bundled();
    let mut checked = 0;
    for (name, bundle) in fixtures() {
        let publication = publish(&bundle, &gaz).unwrap();
        let doc = HtmlDocument::parse(&publication.html_text).unwrap();
        let g = extract_rdfa(&doc).unwrap();
        for ann in g.subjects_of_type(&Iri::new(OA_ANNOTATION)) {
            let target = single(&g, ann, OA_HAS_TARGET).as_iri().unwrap().clone();
            let source = single(&g, &target, OA_HAS_SOURCE).as_iri().unwrap().clone();
            let (has_selector, exact_p, start_p) = (Iri::new(OA_HAS_SELECTOR), Iri::new(OA_EXACT), Iri::new(OA_START));
            let selectors: Vec<&Iri> = g.objects(&target, &has_selector).filter_map(Term::as_iri).collect();
            let quote = selectors.iter().find(|s| g.objects(s, &exact_p).next().is_some()).unwrap();
            let position = selectors.iter().find(|s| g.objects(s, &start_p).next().is_some()).unwrap();
            let exact = single(&g, quote, OA_EXACT).as_literal().unwrap().lexical.clone();
            let start: usize = single(&g, position, OA_START).as_literal().unwrap().lexical.parse().unwrap();
            let end: usize = single(&g, position, OA_END).as_literal().unwrap().lexical.parse().unwrap();

            let block = doc.find_by_id(source.fragment().unwrap()).unwrap();
            let text: Vec<char> = visible_block_text(block).chars().collect();
            let slice: String = text[start..end].iter().collect();
            assert_eq!(slice, exact, "{name} {ann}");
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} annotations checked");
}

/// Tallies from the raw JSON: heading levels drive a section stack by hand.
fn tally_from_json(path: &Path, ids: &[String]) -> (BTreeMap<String, usize>, Vec<(String, String, Option<String>)>) {
    let raw: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let blocks = raw["blocks"].as_array().unwrap();
    let mut section_of = Vec::new();
    let mut stack: Vec<(u64, usize)> = Vec::new();
    let mut per_section = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        if b["kind"] == "heading" {
            let level = b["level"].as_u64().unwrap();
            while stack.last().is_some_and(|(l, _)| *l >= level) {
                stack.pop();
            }
            stack.push((level, i));
            per_section.insert(ids[i].clone(), 0);
        }
        section_of.push(stack.last().map(|(_, s)| ids[*s].clone()));
    }
    let mut observations = Vec::new();
    for c in raw["comments"].as_array().unwrap() {
        let anchor = &c["anchor"];
        let block = match anchor["block_index"].as_u64() {
            Some(i) => i as usize,
            None => ids.iter().position(|id| anchor["block_id"] == id.as_str()).unwrap(),
        };
        let reviewer = c["author_name"].as_str().unwrap().to_string();
        if let Some(s) = &section_of[block] {
            *per_section.get_mut(s).unwrap() += 1;
        }
        observations.push((reviewer, ids[block].clone(), section_of[block].clone()));
    }
    (per_section, observations)
}

#[test]
fn reports_match_brute_force_tallies() {
    let gaz = Gazetteer::bundled();
    for path in fixture_paths() {
        let bundle = load_bundle(&path).unwrap();
        let publication = publish(&bundle, &gaz).unwrap();
        let g = extract_rdfa(&HtmlDocument::parse(&publication.html_text).unwrap()).unwrap();
        let ids = &publication.article.block_ids;
        let (per_section, observations) = tally_from_json(&path, ids);

        let mut expected: Vec<(Vec<String>, usize)> = per_section.into_iter().map(|(s, n)| (vec![s], n)).collect();
        expected.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let rows = |r: Report| r.rows.into_iter().map(|row| (row.labels, row.count)).collect::<Vec<_>>();
        assert_eq!(rows(Report::from_graph(ReportKind::CommentsPerSection, &g)), expected, "{path:?}");

        let reviewers: BTreeSet<&str> = observations.iter().map(|o| o.0.as_str()).collect();
        let mut common = Vec::new();
        let blocks: BTreeSet<&str> = observations.iter().map(|o| o.1.as_str()).collect();
        for block in blocks {
            let on_block: Vec<_> = observations.iter().filter(|o| o.1 == block).collect();
            let who: BTreeSet<&str> = on_block.iter().map(|o| o.0.as_str()).collect();
            if who == reviewers {
                common.push((vec![block.to_string()], on_block.len()));
            }
        }
        assert_eq!(rows(Report::from_graph(ReportKind::CommonTargets, &g)), common, "{path:?}");

        let mut matrix: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for (r, _, s) in &observations {
            *matrix.entry(vec![r.clone(), s.clone().unwrap_or_else(|| NO_SECTION.into())]).or_default() += 1;
        }
        assert_eq!(
            rows(Report::from_graph(ReportKind::ReviewerSectionMatrix, &g)),
            matrix.into_iter().collect::<Vec<_>>(),
            "{path:?}"
        );

        for kind in ReportKind::ALL {
            assert_eq!(Report::from_graph(kind, &g), Report::from_article(kind, &publication.article), "{path:?} {kind}");
        }
    }
}

#[test]
fn named_fixture_report_answers() {
    let gaz = Gazetteer::bundled();
    let graph_of = |name: &str| publish(&load_bundle(&fixtures_dir().join(name)).unwrap(), &gaz).unwrap().graph;

    let tally = Report::from_graph(ReportKind::CommentsPerSection, &graph_of("comment-tally.json"));
    assert_eq!(tally.rows[0].labels, ["section-introduction"]);
    assert_eq!(tally.rows[0].count, 2);
    assert_eq!((tally.rows[1].labels[0].as_str(), tally.rows[1].count), ("section-methods", 1));

    let common = Report::from_graph(ReportKind::CommonTargets, &graph_of("common-targets.json"));
    assert_eq!(common.rows.iter().map(|r| r.labels[0].as_str()).collect::<Vec<_>>(), ["p-3"]);

    let zero = Report::from_graph(ReportKind::CommentsPerSection, &graph_of("zero-comments.json"));
    assert!(!zero.rows.is_empty() && zero.rows.iter().all(|r| r.count == 0));
}

fn read_titles() -> Vec<(String, BTreeSet<DiscourseClass>)> {
    let titles = fs::read_to_string(fixtures_dir().join("gazetteer-titles.txt")).unwrap();
    let expected = fs::read_to_string(fixtures_dir().join("gazetteer-titles.expected.tsv")).unwrap();
    let expected: Vec<(&str, &str)> = expected.lines().map(|l| l.split_once('\t').unwrap()).collect();
    assert_eq!(titles.lines().count(), 30);
    titles
        .lines()
        .zip(expected)
        .map(|(title, (t2, classes))| {
            assert_eq!(title, t2);
            let set = classes.split(',').filter(|c| !c.is_empty()).map(|c| c.parse().unwrap()).collect();
            (title.to_string(), set)
        })
        .collect()
}

#[test]
fn thirty_titles_classify_as_hand_checked() {
    let gaz = Gazetteer::bundled();
    for (title, expected) in read_titles() {
        let got = classify_heading(&title, &gaz);
        let false_positives: Vec<_> = got.difference(&expected).collect();
        assert!(false_positives.is_empty(), "{title:?}: unexpected {false_positives:?}");
        assert_eq!(got, expected, "{title:?}");
    }
}

#[test]
fn titles_equal_to_a_keyword_are_classified() {
    let gaz = Gazetteer::bundled();
    let keywords: BTreeSet<String> = gaz.keywords().collect();
    for (title, _) in read_titles() {
        if keywords.contains(&arann_core::discourse::normalize_title(&title)) {
            assert!(!classify_heading(&title, &gaz).is_empty(), "{title:?}");
        }
    }
}
