use std::collections::HashMap;
use std::fmt;

use crate::rdf::{Graph, Iri, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    /// Variable name without the leading `?`.
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn iri(value: impl Into<String>) -> Self {
        PatternTerm::Term(Term::iri(value))
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(name) => write!(f, "?{name}"),
            PatternTerm::Term(term) => term.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: PatternTerm, p: PatternTerm, o: PatternTerm) -> Self {
        TriplePattern { s, p, o }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.s, &self.p, &self.o]
    }
}

/// True when `name` is a valid variable name (without the `?`).
pub fn is_var_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Variables in order of first appearance.
pub fn pattern_variables(patterns: &[TriplePattern]) -> Vec<String> {
    let mut vars: Vec<String> = Vec::new();
    for pattern in patterns {
        for term in pattern.positions() {
            if let PatternTerm::Var(name) = term {
                if !vars.contains(name) {
                    vars.push(name.clone());
                }
            }
        }
    }
    vars
}

/// Solutions as rows aligned with `variables`, sorted by the serialized
/// terms of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingSet {
    pub variables: Vec<String>,
    pub solutions: Vec<Vec<Term>>,
}

impl BindingSet {
    pub fn new(variables: Vec<String>, mut solutions: Vec<Vec<Term>>) -> Self {
        solutions.sort_by_cached_key(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>());
        solutions.dedup();
        BindingSet { variables, solutions }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn get(&self, row: usize, var: &str) -> Option<&Term> {
        let col = self.variables.iter().position(|v| v == var)?;
        self.solutions.get(row)?.get(col)
    }

    /// Header of variable names, then one line per solution with terms in
    /// N-Triples syntax.
    pub fn to_tsv(&self) -> String {
        let mut out = self.variables.join("\t");
        out.push('\n');
        for row in &self.solutions {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

struct Index<'g> {
    all: Vec<&'g Triple>,
    by_subject: HashMap<&'g Iri, Vec<&'g Triple>>,
    by_predicate: HashMap<&'g Iri, Vec<&'g Triple>>,
    by_object: HashMap<&'g Term, Vec<&'g Triple>>,
}

impl<'g> Index<'g> {
    fn new(g: &'g Graph) -> Self {
        let mut index =
            Index { all: Vec::new(), by_subject: HashMap::new(), by_predicate: HashMap::new(), by_object: HashMap::new() };
        for t in g {
            index.all.push(t);
            index.by_subject.entry(&t.subject).or_default().push(t);
            index.by_predicate.entry(&t.predicate).or_default().push(t);
            index.by_object.entry(&t.object).or_default().push(t);
        }
        index
    }

    /// Smallest candidate list for a pattern whose positions may be bound.
    fn candidates(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> &[&'g Triple] {
        let lists = [
            s.map(|t| t.as_iri().and_then(|iri| self.by_subject.get(iri))),
            p.map(|t| t.as_iri().and_then(|iri| self.by_predicate.get(iri))),
            o.map(|t| self.by_object.get(t)),
        ];
        let mut best: &[&'g Triple] = &self.all;
        for list in lists.into_iter().flatten() {
            let list = list.map_or(&[][..], Vec::as_slice);
            if list.len() < best.len() {
                best = list;
            }
        }
        best
    }
}

/// All assignments of the patterns' variables under which every pattern is
/// a triple of `g`.
pub fn match_bgp(g: &Graph, patterns: &[TriplePattern]) -> BindingSet {
    let variables = pattern_variables(patterns);
    if patterns.is_empty() {
        return BindingSet::new(variables, Vec::new());
    }
    let index = Index::new(g);
    let slot = |term: &PatternTerm| match term {
        PatternTerm::Var(name) => Ok(variables.iter().position(|v| v == name).expect("collected above")),
        PatternTerm::Term(t) => Err(t.clone()),
    };
    let compiled: Vec<[Result<usize, Term>; 3]> =
        patterns.iter().map(|p| [slot(&p.s), slot(&p.p), slot(&p.o)]).collect();
    let order = join_order(&compiled, &index);

    let mut partial: Vec<Vec<Option<Term>>> = vec![vec![None; variables.len()]];
    for &i in &order {
        let pattern = &compiled[i];
        let mut next = Vec::new();
        for binding in &partial {
            let bound = |pos: &Result<usize, Term>| -> Option<Term> {
                match pos {
                    Ok(v) => binding[*v].clone(),
                    Err(t) => Some(t.clone()),
                }
            };
            let (s, p, o) = (bound(&pattern[0]), bound(&pattern[1]), bound(&pattern[2]));
            for triple in index.candidates(s.as_ref(), p.as_ref(), o.as_ref()) {
                let values = [Term::Iri(triple.subject.clone()), Term::Iri(triple.predicate.clone()), triple.object.clone()];
                let mut extended = binding.clone();
                let ok = pattern.iter().zip(values).all(|(pos, value)| match pos {
                    Err(t) => *t == value,
                    Ok(v) => match &extended[*v] {
                        Some(existing) => *existing == value,
                        None => {
                            extended[*v] = Some(value);
                            true
                        }
                    },
                });
                if ok {
                    next.push(extended);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    let solutions = partial.into_iter().map(|row| row.into_iter().map(|t| t.expect("every variable bound")).collect()).collect();
    BindingSet::new(variables, solutions)
}

/// Greedy order: start from the most selective pattern, then prefer
/// patterns sharing a variable with those already joined.
fn join_order(compiled: &[[Result<usize, Term>; 3]], index: &Index<'_>) -> Vec<usize> {
    let estimate = |pattern: &[Result<usize, Term>; 3]| {
        let fixed = |k: usize| pattern[k].as_ref().err();
        index.candidates(fixed(0), fixed(1), fixed(2)).len()
    };
    let mut remaining: Vec<usize> = (0..compiled.len()).collect();
    let mut seen_vars: Vec<usize> = Vec::new();
    let mut order = Vec::with_capacity(compiled.len());
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .enumerate()
            .min_by_key(|&(_, &i)| {
                let connected = order.is_empty() || compiled[i].iter().any(|p| p.as_ref().is_ok_and(|v| seen_vars.contains(v)));
                (!connected, estimate(&compiled[i]), i)
            })
            .map(|(k, _)| k)
            .expect("non-empty");
        let i = remaining.remove(pick);
        seen_vars.extend(compiled[i].iter().filter_map(|p| p.as_ref().ok().copied()));
        order.push(i);
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab::{DCTERMS_CREATOR, OA_ANNOTATION, RDF_TYPE};
    use proptest::prelude::*;

    fn g(triples: &[(&str, &str, Term)]) -> Graph {
        triples.iter().map(|(s, p, o)| Triple::new(Iri::new(*s), Iri::new(*p), o.clone())).collect()
    }

    #[test]
    fn total_enumeration() {
        let graph = g(&[("http://a/1", "http://a/p", Term::literal("x")), ("http://a/2", "http://a/p", Term::iri("http://a/1"))]);
        let all = match_bgp(&graph, &[TriplePattern::new(PatternTerm::var("s"), PatternTerm::var("p"), PatternTerm::var("o"))]);
        assert_eq!(all.len(), 2);
        assert_eq!(all.variables, ["s", "p", "o"]);
    }

    #[test]
    fn empty_graph_has_no_solutions() {
        let q = [TriplePattern::new(PatternTerm::var("s"), PatternTerm::var("p"), PatternTerm::var("o"))];
        assert!(match_bgp(&Graph::new(), &q).is_empty());
    }

    #[test]
    fn join_on_shared_variable() {
        let graph = g(&[
            ("http://a/c1", RDF_TYPE, Term::iri(OA_ANNOTATION)),
            ("http://a/c1", DCTERMS_CREATOR, Term::literal("A")),
            ("http://a/c2", DCTERMS_CREATOR, Term::literal("B")),
        ]);
        let q = [
            TriplePattern::new(PatternTerm::var("c"), PatternTerm::iri(RDF_TYPE), PatternTerm::iri(OA_ANNOTATION)),
            TriplePattern::new(PatternTerm::var("c"), PatternTerm::iri(DCTERMS_CREATOR), PatternTerm::var("r")),
        ];
        let result = match_bgp(&graph, &q);
        assert_eq!(result.solutions, vec![vec![Term::iri("http://a/c1"), Term::literal("A")]]);
    }

    #[test]
    fn repeated_variable_in_one_pattern() {
        let graph = g(&[("http://a/x", "http://a/p", Term::iri("http://a/x")), ("http://a/x", "http://a/p", Term::iri("http://a/y"))]);
        let q = [TriplePattern::new(PatternTerm::var("v"), PatternTerm::iri("http://a/p"), PatternTerm::var("v"))];
        assert_eq!(match_bgp(&graph, &q).solutions, vec![vec![Term::iri("http://a/x")]]);
    }

    #[test]
    fn ground_pattern_yields_one_empty_solution() {
        let graph = g(&[("http://a/x", "http://a/p", Term::literal("1"))]);
        let hit = [TriplePattern::new(PatternTerm::iri("http://a/x"), PatternTerm::iri("http://a/p"), PatternTerm::Term(Term::literal("1")))];
        assert_eq!(match_bgp(&graph, &hit).solutions, vec![Vec::<Term>::new()]);
        let miss = [TriplePattern::new(PatternTerm::iri("http://a/x"), PatternTerm::iri("http://a/p"), PatternTerm::Term(Term::literal("2")))];
        assert!(match_bgp(&graph, &miss).is_empty());
    }

    #[test]
    fn tsv_output() {
        let graph = g(&[("http://a/x", "http://a/p", Term::literal("tab\there"))]);
        let q = [TriplePattern::new(PatternTerm::var("s"), PatternTerm::iri("http://a/p"), PatternTerm::var("o"))];
        assert_eq!(match_bgp(&graph, &q).to_tsv(), "s\to\n<http://a/x>\t\"tab\there\"\n");
    }

    fn small_term() -> impl Strategy<Value = Term> {
        prop_oneof![(0..5u8).prop_map(|i| Term::iri(format!("http://a/{i}"))), (0..2u8).prop_map(|i| Term::literal(i.to_string()))]
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        proptest::collection::vec((0..5u8, 0..3u8, small_term()), 0..40).prop_map(|ts| {
            ts.into_iter()
                .map(|(s, p, o)| Triple::new(Iri::new(format!("http://a/{s}")), Iri::new(format!("http://a/{p}")), o))
                .collect()
        })
    }

    fn pattern_term() -> impl Strategy<Value = PatternTerm> {
        prop_oneof![(0..3u8).prop_map(|i| PatternTerm::var(format!("v{i}"))), small_term().prop_map(PatternTerm::Term)]
    }

    fn query() -> impl Strategy<Value = Vec<TriplePattern>> {
        proptest::collection::vec(
            (pattern_term(), pattern_term(), pattern_term()).prop_map(|(s, p, o)| TriplePattern::new(s, p, o)),
            1..4,
        )
    }

    proptest! {
        #[test]
        fn adding_a_triple_never_removes_solutions(graph in small_graph(), q in query(), s in 0..5u8, o in small_term()) {
            let before = match_bgp(&graph, &q);
            let mut bigger = graph.clone();
            bigger.insert(Triple::new(Iri::new(format!("http://a/{s}")), Iri::new("http://a/0"), o));
            let after = match_bgp(&bigger, &q);
            for row in &before.solutions {
                prop_assert!(after.solutions.contains(row));
            }
        }

        #[test]
        fn every_solution_binds_every_variable(graph in small_graph(), q in query()) {
            let result = match_bgp(&graph, &q);
            for row in &result.solutions {
                prop_assert_eq!(row.len(), result.variables.len());
            }
        }
    }
}
