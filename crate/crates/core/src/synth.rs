//! Random and synthetic article bundles for property tests and load tests.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use crate::model::{
    structural_ids, Anchor, ArticleBundle, ArticleMetadata, Author, BlockKind, BlockNode, BlockRef, Inline, Mark,
    MediaAsset, ReviewComment,
};

const WORDS: &[&str] = &[
    "the", "model", "results", "we", "show", "that", "data", "naïve", "Über", "café", "日本語", "🙂",
    "a<b", "R&D", "\"quoted\"", "it's", "work", "future", "methods", "x", "state-of-the-art", "  ", "tab\there",
];

const TITLES: &[&str] = &[
    "Introduction",
    "Introduction and Motivation",
    "Related Work",
    "3.1 Methods",
    "Results",
    "Results",
    "Evaluation & Results",
    "Discussion",
    "IV. Conclusions",
    "Future Work",
    "Acknowledgements",
    "Über Zeugma",
    "Zeugma Considerations",
    "1.",
    "Model",
];

const REVIEWERS: &[&str] = &["Reviewer A", "Reviewer B", "Zoë Ng", "R. <Three>"];

fn words(rng: &mut StdRng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| *WORDS.choose(rng).expect("non-empty")).collect::<Vec<_>>().join(" ")
}

fn runs(rng: &mut StdRng) -> Vec<Inline> {
    let n = rng.random_range(0..4);
    (0..n)
        .map(|_| {
            let mut marks = Vec::new();
            if rng.random_bool(0.2) {
                marks.push(Mark::Emphasis);
            }
            if rng.random_bool(0.2) {
                marks.push(Mark::Strong);
            }
            if rng.random_bool(0.1) {
                marks.push(Mark::Link { href: format!("https://example.org/ref/{}", rng.random_range(0..3)) });
            }
            let text = if rng.random_bool(0.05) { String::new() } else { words(rng, 1, 6) + " " };
            Inline { text, marks }
        })
        .collect()
}

fn timestamp(rng: &mut StdRng) -> String {
    format!(
        "20{:02}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        rng.random_range(10..30),
        rng.random_range(1..=12),
        rng.random_range(1..=28),
        rng.random_range(0..24),
        rng.random_range(0..60),
        rng.random_range(0..60)
    )
}

/// A valid bundle of random shape: nested and duplicate headings, marks,
/// non-ASCII text, every block kind, and possibly overlapping comments.
pub fn random_bundle(rng: &mut StdRng) -> ArticleBundle {
    let mut blocks = Vec::new();
    let mut media = Vec::new();
    for _ in 0..rng.random_range(0..14) {
        let kind = match rng.random_range(0..10) {
            0..=2 => BlockKind::Heading {
                level: rng.random_range(1..=4),
                content: if rng.random_bool(0.8) {
                    vec![Inline::plain(*TITLES.choose(rng).expect("non-empty"))]
                } else {
                    runs(rng)
                },
            },
            3..=5 => BlockKind::Paragraph { content: runs(rng) },
            6 => {
                let name = format!("fig-{}.png", media.len() + 1);
                media.push(MediaAsset { name: name.clone(), bytes: (0..rng.random_range(1..64)).map(|_| rng.random()).collect() });
                BlockKind::Figure {
                    media_name: name,
                    caption: runs(rng),
                    width: rng.random_bool(0.5).then(|| rng.random_range(10..900)),
                    height: None,
                }
            }
            7 => BlockKind::Table {
                rows: (0..rng.random_range(0..3)).map(|_| (0..rng.random_range(0..3)).map(|_| runs(rng)).collect()).collect(),
            },
            8 => BlockKind::ReferenceEntry { content: runs(rng) },
            _ => BlockKind::List { ordered: rng.random_bool(0.5), items: (0..rng.random_range(0..3)).map(|_| runs(rng)).collect() },
        };
        blocks.push(BlockNode { kind });
    }
    let mut bundle = ArticleBundle {
        metadata: ArticleMetadata {
            title: format!("T {}", words(rng, 1, 5)),
            abstract_text: if rng.random_bool(0.7) { words(rng, 0, 12) } else { String::new() },
            authors: (0..rng.random_range(0..3))
                .map(|i| Author {
                    name: format!("Author {i} {}", words(rng, 1, 2)),
                    affiliation: rng.random_bool(0.5).then(|| words(rng, 1, 3)),
                    email: rng.random_bool(0.3).then(|| format!("a{i}@example.org")),
                })
                .collect(),
            base_uri: format!("https://example.org/articles/{}", rng.random_range(0..1000)),
        },
        blocks,
        comments: Vec::new(),
        media,
    };
    for _ in 0..rng.random_range(0..6) {
        if let Some(comment) = random_comment(rng, &bundle) {
            bundle.comments.push(comment);
        }
    }
    bundle
}

/// A comment anchored to a random range of a random non-empty block, with an
/// id not yet used in `bundle`. None when no block has text.
pub fn random_comment(rng: &mut StdRng, bundle: &ArticleBundle) -> Option<ReviewComment> {
    let candidates: Vec<usize> = (0..bundle.blocks.len()).filter(|&i| bundle.blocks[i].char_len() > 0).collect();
    let &block = candidates.choose(rng)?;
    let text = bundle.blocks[block].plain_text();
    let len = text.chars().count();
    let start = rng.random_range(0..len);
    let end = rng.random_range(start + 1..=len);
    let mut n = bundle.comments.len() + 1;
    let used = |id: &str| bundle.comments.iter().any(|c| crate::model::slug_token(&c.comment_id) == crate::model::slug_token(id));
    while used(&format!("c{n}")) {
        n += 1;
    }
    let ids = structural_ids(&bundle.blocks);
    Some(ReviewComment {
        comment_id: format!("c{n}"),
        author_name: REVIEWERS.choose(rng).expect("non-empty").to_string(),
        created: timestamp(rng),
        body_text: words(rng, 0, 10),
        anchor: Anchor {
            block: if rng.random_bool(0.5) { BlockRef::Index(block) } else { BlockRef::Id(ids[block].clone()) },
            start,
            end,
            exact: rng.random_bool(0.5).then(|| crate::model::char_slice(&text, start, end)),
        },
    })
}

pub fn random_bundle_from_seed(seed: u64) -> ArticleBundle {
    random_bundle(&mut StdRng::seed_from_u64(seed))
}

/// A large article: `sections` level-1 sections, `paragraphs` paragraphs
/// spread evenly over them, and `comments` comments spread over the
/// paragraphs by a fixed seed.
pub fn synthetic_bundle(sections: usize, paragraphs: usize, comments: usize, seed: u64) -> ArticleBundle {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut blocks = Vec::with_capacity(sections + paragraphs);
    let mut paragraph_blocks = Vec::with_capacity(paragraphs);
    for s in 0..sections {
        blocks.push(BlockNode::heading(1, &format!("{} {}", TITLES[s % TITLES.len()], s + 1)));
        let count = paragraphs / sections.max(1) + usize::from(s < paragraphs % sections.max(1));
        for _ in 0..count {
            paragraph_blocks.push(blocks.len());
            let text = (0..40).map(|_| *WORDS[..20].choose(&mut rng).expect("non-empty")).collect::<Vec<_>>().join(" ");
            blocks.push(BlockNode::paragraph(&text));
        }
    }
    let mut bundle = ArticleBundle {
        metadata: ArticleMetadata {
            title: "Synthetic load article".into(),
            abstract_text: "Generated.".into(),
            authors: vec![Author { name: "Load Test".into(), affiliation: None, email: None }],
            base_uri: "https://example.org/synthetic".into(),
        },
        blocks,
        comments: Vec::with_capacity(comments),
        media: Vec::new(),
    };
    for n in 0..comments {
        let Some(&block) = paragraph_blocks.choose(&mut rng) else { break };
        let len = bundle.blocks[block].char_len();
        let start = rng.random_range(0..len);
        let end = rng.random_range(start + 1..=len.min(start + 80));
        bundle.comments.push(ReviewComment {
            comment_id: format!("c{}", n + 1),
            author_name: REVIEWERS[n % REVIEWERS.len()].to_string(),
            created: timestamp(&mut rng),
            body_text: format!("Comment {}", n + 1),
            anchor: Anchor { block: BlockRef::Index(block), start, end, exact: None },
        });
    }
    bundle
}
