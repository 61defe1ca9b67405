//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use arann_core::discourse::{classify_heading, DiscourseClass, Gazetteer};
use arann_core::html::{inject_comment, Element, HtmlDocument};
use arann_core::ingest::{load_bundle, write_bundle};
use arann_core::model::ArticleBundle;
use arann_core::pipeline::{publish, Publication};
use arann_core::query::{match_bgp, pattern_variables, PatternTerm, Report, ReportKind, TriplePattern, NO_SECTION};
use arann_core::rdf::vocab::{OA_ANNOTATION, OA_END, OA_EXACT, OA_HAS_SELECTOR, OA_HAS_SOURCE, OA_HAS_TARGET, OA_START};
use arann_core::rdf::{direct_triples, extract_rdfa, Graph, Iri, Term, Triple};
use arann_core::synth::{random_bundle, random_bundle_from_seed, random_comment, synthetic_bundle};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sha2::{Digest, Sha256};

const ROUND_TRIP_RANDOM: u64 = 200;
const ROUND_TRIP_LIMIT: Duration = Duration::from_secs(10);
const BGP_INSTANCES: u64 = 100;
const BGP_MAX_TRIPLES: usize = 10_000;
const BGP_LIMIT: Duration = Duration::from_secs(30);
const INJECTIONS: usize = 20;
const PERF_LIMIT: Duration = Duration::from_secs(5);
const PERF_MEMORY_KIB: i64 = 512 * 1024;

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 round-trip closure", round_trip),
        ("2 BGP oracle equivalence", bgp_oracle),
        ("3 report consistency", report_consistency),
        ("4 gazetteer fidelity", gazetteer_fidelity),
        ("5 anchor fidelity", anchor_fidelity),
        ("6 determinism", determinism),
        ("7 injection equivalence", injection_equivalence),
        ("8 desk-scale performance", performance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixtures() -> Vec<(String, ArticleBundle)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().expect("file name").to_string_lossy().into_owned();
            let bundle = load_bundle(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, bundle)
        })
        .collect()
}

fn publish_ok(name: &str, bundle: &ArticleBundle) -> Result<Publication, String> {
    publish(bundle, &Gazetteer::bundled()).map_err(|e| format!("{name}: {e}"))
}

fn extracted(publication: &Publication) -> Result<Graph, String> {
    let doc = HtmlDocument::parse(&publication.html_text).map_err(|e| e.to_string())?;
    extract_rdfa(&doc).map_err(|e| e.to_string())
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut bundles: Vec<(String, ArticleBundle)> = fixtures();
    let fixture_count = bundles.len();
    ensure(fixture_count >= 10, || format!("only {fixture_count} fixtures"))?;
    bundles.extend((0..ROUND_TRIP_RANDOM).map(|seed| (format!("random seed {seed}"), random_bundle_from_seed(seed))));
    let mut triples = 0;
    for (name, bundle) in &bundles {
        let publication = publish_ok(name, bundle)?;
        let graph = extracted(&publication)?;
        let direct = direct_triples(&publication.article);
        ensure(graph == direct, || format!("{name}: extracted graph differs from direct triples"))?;
        triples += graph.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ROUND_TRIP_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{fixture_count} fixtures + {ROUND_TRIP_RANDOM} random bundles, {triples} triples, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

/// Joins patterns in the given order, scanning every triple for every
/// partial solution.
fn nested_loop_join(g: &Graph, patterns: &[TriplePattern]) -> Vec<Vec<Term>> {
    let triples: Vec<[Term; 3]> =
        g.iter().map(|t| [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()]).collect();
    let vars = pattern_variables(patterns);
    let mut partial: Vec<Vec<Option<Term>>> = vec![vec![None; vars.len()]];
    for pattern in patterns {
        let slots: Vec<Result<usize, &Term>> = [&pattern.s, &pattern.p, &pattern.o]
            .into_iter()
            .map(|pt| match pt {
                PatternTerm::Var(v) => Ok(vars.iter().position(|x| x == v).expect("variable listed")),
                PatternTerm::Term(t) => Err(t),
            })
            .collect();
        let mut next = Vec::new();
        for binding in &partial {
            for values in &triples {
                let mut fresh: Vec<(usize, &Term)> = Vec::new();
                let ok = slots.iter().zip(values).all(|(slot, value)| match slot {
                    Err(constant) => *constant == value,
                    Ok(v) => match (&binding[*v], fresh.iter().find(|(f, _)| f == v)) {
                        (Some(bound), _) => bound == value,
                        (None, Some((_, seen))) => *seen == value,
                        (None, None) => {
                            fresh.push((*v, value));
                            true
                        }
                    },
                });
                if ok {
                    let mut b = binding.clone();
                    for (v, value) in fresh {
                        b[v] = Some(value.clone());
                    }
                    next.push(b);
                }
            }
        }
        partial = next;
    }
    let mut rows: Vec<Vec<Term>> =
        partial.into_iter().map(|b| b.into_iter().map(|t| t.expect("all variables bound")).collect()).collect();
    rows.sort_by_key(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>());
    rows.dedup();
    rows
}

fn random_graph(rng: &mut StdRng, size: usize) -> Graph {
    let subjects = (size / 4).max(1);
    let mut g = Graph::new();
    while g.len() < size {
        let s = Iri::new(format!("http://ex.org/s{}", rng.random_range(0..subjects)));
        let p = Iri::new(format!("http://ex.org/p{}", rng.random_range(0..20)));
        let o = if rng.random_bool(0.6) {
            Term::iri(format!("http://ex.org/s{}", rng.random_range(0..subjects)))
        } else {
            Term::literal(format!("v{}", rng.random_range(0..50)))
        };
        g.insert(Triple::new(s, p, o));
    }
    g
}

/// 1 to 3 patterns, each with at least one constant taken from an existing
/// triple, each after the first sharing a variable with an earlier one.
fn random_query(rng: &mut StdRng, g: &Graph) -> Vec<TriplePattern> {
    let triples: Vec<&Triple> = g.iter().collect();
    let count = rng.random_range(1..=3);
    let mut patterns = Vec::new();
    let mut used: Vec<String> = Vec::new();
    while patterns.len() < count {
        let t = triples[rng.random_range(0..triples.len())];
        let values = [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()];
        let constant = rng.random_range(0..3);
        let positions: Vec<PatternTerm> = (0..3)
            .map(|k| {
                if k == constant || rng.random_bool(0.25) {
                    PatternTerm::Term(values[k].clone())
                } else {
                    PatternTerm::var(format!("x{}", rng.random_range(0..3)))
                }
            })
            .collect();
        let vars: Vec<String> = positions
            .iter()
            .filter_map(|p| match p {
                PatternTerm::Var(v) => Some(v.clone()),
                PatternTerm::Term(_) => None,
            })
            .collect();
        if vars.is_empty() || (!patterns.is_empty() && !vars.iter().any(|v| used.contains(v))) {
            continue;
        }
        used.extend(vars);
        let [s, p, o]: [PatternTerm; 3] = positions.try_into().expect("three positions");
        patterns.push(TriplePattern::new(s, p, o));
    }
    patterns
}

fn bgp_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut largest, mut solutions) = (0, 0);
    for instance in 0..BGP_INSTANCES {
        let size = if instance == 0 { BGP_MAX_TRIPLES } else { rng.random_range(1..=BGP_MAX_TRIPLES) };
        let g = random_graph(&mut rng, size);
        let q = random_query(&mut rng, &g);
        let got = match_bgp(&g, &q);
        let expected = nested_loop_join(&g, &q);
        ensure(got.variables == pattern_variables(&q), || format!("instance {instance}: variable list differs"))?;
        ensure(got.solutions == expected, || {
            format!("instance {instance}: {} solutions, oracle has {}", got.solutions.len(), expected.len())
        })?;
        largest = largest.max(g.len());
        solutions += expected.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < BGP_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{BGP_INSTANCES} instances up to {largest} triples, {solutions} solutions total, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

type Tally = (Vec<(Vec<String>, usize)>, Vec<(Vec<String>, usize)>, Vec<(Vec<String>, usize)>);

/// The three reports tallied from the bundle's comment list alone.
fn tally_from_bundle(bundle: &ArticleBundle, ids: &[String]) -> Tally {
    let mut section_of = Vec::new();
    let mut stack: Vec<(u8, usize)> = Vec::new();
    let mut per_section: BTreeMap<String, usize> = BTreeMap::new();
    for (i, block) in bundle.blocks.iter().enumerate() {
        if let Some(level) = block.heading_level() {
            while stack.last().is_some_and(|(l, _)| *l >= level) {
                stack.pop();
            }
            stack.push((level, i));
            per_section.insert(ids[i].clone(), 0);
        }
        section_of.push(stack.last().map(|(_, s)| ids[*s].clone()));
    }
    let mut observations = Vec::new();
    for c in &bundle.comments {
        let block = match &c.anchor.block {
            arann_core::model::BlockRef::Index(i) => *i,
            arann_core::model::BlockRef::Id(id) => ids.iter().position(|x| x == id).expect("anchor resolves"),
        };
        if let Some(s) = &section_of[block] {
            *per_section.entry(s.clone()).or_default() += 1;
        }
        observations.push((c.author_name.clone(), ids[block].clone(), section_of[block].clone()));
    }

    let mut per: Vec<(Vec<String>, usize)> = per_section.into_iter().map(|(s, n)| (vec![s], n)).collect();
    per.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let reviewers: BTreeSet<&str> = observations.iter().map(|o| o.0.as_str()).collect();
    let blocks: BTreeSet<&str> = observations.iter().map(|o| o.1.as_str()).collect();
    let mut common = Vec::new();
    for block in blocks {
        let hits: Vec<_> = observations.iter().filter(|o| o.1 == block).collect();
        if hits.iter().map(|o| o.0.as_str()).collect::<BTreeSet<_>>() == reviewers {
            common.push((vec![block.to_string()], hits.len()));
        }
    }

    let mut matrix: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for (r, _, s) in &observations {
        *matrix.entry(vec![r.clone(), s.clone().unwrap_or_else(|| NO_SECTION.into())]).or_default() += 1;
    }
    (per, common, matrix.into_iter().collect())
}

fn report_consistency() -> Outcome {
    let mut reports = 0;
    for (name, bundle) in fixtures() {
        let publication = publish_ok(&name, &bundle)?;
        let g = extracted(&publication)?;
        let (per, common, matrix) = tally_from_bundle(&bundle, &publication.article.block_ids);
        for (kind, expected) in [
            (ReportKind::CommentsPerSection, per),
            (ReportKind::CommonTargets, common),
            (ReportKind::ReviewerSectionMatrix, matrix),
        ] {
            let got: Vec<(Vec<String>, usize)> =
                Report::from_graph(kind, &g).rows.into_iter().map(|r| (r.labels, r.count)).collect();
            ensure(got == expected, || format!("{name} {kind}: graph gives {got:?}, bundle gives {expected:?}"))?;
            reports += 1;
        }
    }
    Ok(format!("{reports} reports equal across graph and bundle tallies"))
}

fn gazetteer_fidelity() -> Outcome {
    let gaz = Gazetteer::bundled();
    let intro = classify_heading("Introduction", &gaz);
    ensure(intro == BTreeSet::from([DiscourseClass::Introduction]), || format!("Introduction -> {intro:?}"))?;
    let both = classify_heading("Introduction and Motivation", &gaz);
    ensure(both == BTreeSet::from([DiscourseClass::Introduction, DiscourseClass::Motivation]), || {
        format!("Introduction and Motivation -> {both:?}")
    })?;

    let titles = fs::read_to_string(fixtures_dir().join("gazetteer-titles.txt")).map_err(|e| e.to_string())?;
    let expected = fs::read_to_string(fixtures_dir().join("gazetteer-titles.expected.tsv")).map_err(|e| e.to_string())?;
    let titles: Vec<&str> = titles.lines().collect();
    ensure(titles.len() == 30, || format!("{} titles", titles.len()))?;
    let (mut false_positives, mut misses) = (Vec::new(), Vec::new());
    for (title, line) in titles.iter().zip(expected.lines()) {
        let (t, classes) = line.split_once('\t').ok_or("malformed expected line")?;
        ensure(t == *title, || format!("expected file out of step at {title:?}"))?;
        let want: BTreeSet<DiscourseClass> = classes
            .split(',')
            .filter(|c| !c.is_empty())
            .map(|c| c.parse::<DiscourseClass>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let got = classify_heading(title, &gaz);
        false_positives.extend(got.difference(&want).map(|c| format!("{title}: {c}")));
        misses.extend(want.difference(&got).map(|c| format!("{title}: {c}")));
    }
    ensure(false_positives.is_empty(), || format!("false positives {false_positives:?}"))?;
    ensure(misses.is_empty(), || format!("missed {misses:?}"))?;
    Ok("worked example and 30-title list: 0 false positives, 0 misses".into())
}

fn rendered_text(block: &Element) -> String {
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

fn object<'g>(g: &'g Graph, s: &Iri, p: &str) -> Option<&'g Term> {
    g.iter().find(|t| t.subject == *s && t.predicate.as_str() == p).map(|t| &t.object)
}

fn anchor_fidelity() -> Outcome {
    let mut checked = 0;
    for (name, bundle) in fixtures() {
        let publication = publish_ok(&name, &bundle)?;
        let doc = HtmlDocument::parse(&publication.html_text).map_err(|e| e.to_string())?;
        let g = extract_rdfa(&doc).map_err(|e| e.to_string())?;
        for ann in g.subjects_of_type(&Iri::new(OA_ANNOTATION)) {
            let fail = |what: &str| format!("{name} {ann}: {what}");
            let target = object(&g, ann, OA_HAS_TARGET).and_then(Term::as_iri).ok_or_else(|| fail("no target"))?;
            let source = object(&g, target, OA_HAS_SOURCE).and_then(Term::as_iri).ok_or_else(|| fail("no source"))?;
            let selectors: Vec<&Iri> = g
                .iter()
                .filter(|t| t.subject == *target && t.predicate.as_str() == OA_HAS_SELECTOR)
                .filter_map(|t| t.object.as_iri())
                .collect();
            let literal = |p: &str| selectors.iter().find_map(|s| object(&g, s, p)).and_then(Term::as_literal);
            let exact = literal(OA_EXACT).ok_or_else(|| fail("no exact"))?.lexical.clone();
            let offset = |p: &str| -> Result<usize, String> {
                literal(p).and_then(|l| l.lexical.parse().ok()).ok_or_else(|| fail(p))
            };
            let (start, end) = (offset(OA_START)?, offset(OA_END)?);
            let block = source
                .fragment()
                .and_then(|id| doc.find_by_id(id))
                .ok_or_else(|| fail("source block missing from the page"))?;
            let text: Vec<char> = rendered_text(block).chars().collect();
            ensure(start <= end && end <= text.len(), || fail("offsets outside the block text"))?;
            let slice: String = text[start..end].iter().collect();
            ensure(slice == exact, || fail(&format!("exact {exact:?} but offsets select {slice:?}")))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no annotations found".into())?;
    Ok(format!("{checked} annotations, exact == text[start..end] for all"))
}

fn run_convert(bundle: &Path, out: &Path, extra: &[&str]) -> Result<String, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_arann"))
        .arg("convert")
        .arg(bundle)
        .arg("-o")
        .arg(out)
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(output.status.success(), || {
        format!("convert {} failed: {}", bundle.display(), String::from_utf8_lossy(&output.stderr))
    })?;
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

fn sha256_file(path: &Path) -> Result<String, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut archives = 0;
    for (name, _) in fixtures() {
        let bundle = fixtures_dir().join(format!("{name}.json"));
        let (a, b) = (tmp.path().join(format!("{name}-a")), tmp.path().join(format!("{name}-b")));
        for out in [&a, &b] {
            run_convert(&bundle, out, &["--zip", "--fixed-timestamp", "--emit-nt"])?;
        }
        let (ha, hb) = (sha256_file(&a.join("publication.zip"))?, sha256_file(&b.join("publication.zip"))?);
        ensure(ha == hb, || format!("{name}: archive digests differ ({ha} vs {hb})"))?;
        archives += 1;
    }
    let mut goldens = 0;
    for entry in fs::read_dir(fixtures_dir().join("golden")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_stem().ok_or("golden name")?.to_string_lossy().into_owned();
        let golden = fs::read(&path).map_err(|e| e.to_string())?;
        for run in ["a", "b"] {
            let produced = fs::read(tmp.path().join(format!("{name}-{run}/article.html"))).map_err(|e| e.to_string())?;
            ensure(produced == golden, || format!("{name}: run {run} differs from golden HTML"))?;
        }
        goldens += 1;
    }
    ensure(goldens > 0, || "no golden files".into())?;
    Ok(format!("{archives} archive pairs with equal SHA-256, {goldens} golden HTML files byte-identical"))
}

fn injection_equivalence() -> Outcome {
    let mut done = 0;
    let mut seed = 1000;
    while done < INJECTIONS {
        seed += 1;
        let mut rng = StdRng::seed_from_u64(seed);
        let bundle = random_bundle(&mut rng);
        let Some(comment) = random_comment(&mut rng, &bundle) else { continue };
        let name = format!("seed {seed}");
        let published = publish_ok(&name, &bundle)?;
        let page = HtmlDocument::parse(&published.html_text).map_err(|e| e.to_string())?;
        let injected = inject_comment(&page, &comment).map_err(|e| format!("{name}: {e}"))?;

        let mut with = bundle.clone();
        with.comments.push(comment);
        let regenerated = publish_ok(&name, &with)?;
        let reparsed = HtmlDocument::parse(&injected.to_html()).map_err(|e| e.to_string())?;
        ensure(reparsed == regenerated.html, || format!("{name}: trees differ"))?;
        let graph = extract_rdfa(&injected).map_err(|e| e.to_string())?;
        ensure(graph == regenerated.graph, || format!("{name}: triple sets differ"))?;
        done += 1;
    }
    Ok(format!("{done} random insertions equal regeneration as trees and triple sets"))
}

fn max_child_rss_kib() -> i64 {
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    // SAFETY: getrusage only writes into the struct we pass.
    let rc = unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    if rc == 0 {
        usage.ru_maxrss
    } else {
        -1
    }
}

fn performance() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bundle = synthetic_bundle(100, 1000, 500, 42);
    let path = tmp.path().join("synthetic.json");
    fs::write(&path, write_bundle(&bundle)).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let summary = run_convert(&path, &tmp.path().join("out"), &["--zip", "--emit-nt"])?;
    let elapsed = start.elapsed();
    let rss = max_child_rss_kib();
    ensure(rss >= 0, || "getrusage failed".into())?;
    ensure(elapsed < PERF_LIMIT, || format!("took {elapsed:?}"))?;
    ensure(rss < PERF_MEMORY_KIB, || format!("peak RSS {} MiB", rss / 1024))?;
    Ok(format!(
        "100 sections, 1000 paragraphs, 500 comments ({}) in {:.2}s, peak child RSS {:.1} MiB",
        summary.trim(),
        elapsed.as_secs_f64(),
        rss as f64 / 1024.0
    ))
}
