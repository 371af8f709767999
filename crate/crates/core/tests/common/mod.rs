#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use iatc::{Application, GrammarCategory, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const CATEGORIES: [GrammarCategory; 5] = [
    GrammarCategory::Perf,
    GrammarCategory::Rel,
    GrammarCategory::Value,
    GrammarCategory::Meta,
    GrammarCategory::Struct,
];
const TAGS: [&str; 8] = [
    "Assert",
    "implies",
    "not",
    "useful",
    "goal",
    "used_in",
    "x_1",
    "conjunction",
];
const ATTRS: [&str; 2] = ["unspoken", "draft"];
const ATOMS: [&str; 10] = [
    "a",
    "perm_view",
    "finite group",
    "f(x, y)",
    "sqrt{2} + 3",
    "(sqrt(2)+sqrt(3))^2012",
    "G_not_equal_to_union_of_cosets",
    "500th digit",
    "x - [y]",
    "?1",
];

/// Random tree of depth at most `depth` with arity at most 4.
pub fn random_term(rng: &mut impl Rng, depth: usize) -> Term {
    if depth <= 1 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            Term::SubgraphRef(format!("SG{}", rng.gen_range(0..3)))
        } else {
            Term::atom(ATOMS.choose(rng).unwrap())
        };
    }
    let n = rng.gen_range(1..=4);
    let args = (0..n).map(|_| random_term(rng, depth - 1)).collect();
    if rng.gen_bool(0.1) {
        return Term::Set(args);
    }
    let mut app = Application::new(
        *CATEGORIES.choose(rng).unwrap(),
        *TAGS.choose(rng).unwrap(),
        args,
    );
    if rng.gen_bool(0.15) {
        app.attributes.push(ATTRS.choose(rng).unwrap().to_string());
    }
    Term::Application(app)
}

pub fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(&ATOMS[..]).prop_map(Term::atom),
        1 => (0..3u8).prop_map(|i| Term::SubgraphRef(format!("SG{i}"))),
    ];
    leaf.prop_recursive(depth.saturating_sub(1), 64, 4, |inner| {
        prop_oneof![
            6 => (
                proptest::sample::select(&CATEGORIES[..]),
                proptest::sample::select(&TAGS[..]),
                proptest::collection::vec(inner.clone(), 1..=4)
            )
                .prop_map(|(c, t, args)| Term::Application(Application::new(c, t, args))),
            1 => proptest::collection::vec(inner, 1..=4).prop_map(Term::Set),
        ]
    })
}

/// Small alphabet for alignment checks: atoms a, b, c; unary `not` and
/// `useful`; binary `implies`.
pub fn small_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = proptest::sample::select(vec!["a", "b", "c"]).prop_map(Term::atom);
    leaf.prop_recursive(depth.saturating_sub(1), 16, 2, |inner| {
        prop_oneof![
            inner
                .clone()
                .prop_map(|x| Term::app(GrammarCategory::Rel, "not", vec![x])),
            inner
                .clone()
                .prop_map(|x| Term::app(GrammarCategory::Value, "useful", vec![x])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app(
                GrammarCategory::Rel,
                "implies",
                vec![x, y]
            )),
        ]
    })
}

/// Every tree of depth at most `depth` over the small alphabet.
pub fn all_small_terms(depth: usize) -> Vec<Term> {
    let mut terms: Vec<Term> = ["a", "b", "c"].into_iter().map(Term::atom).collect();
    for _ in 1..depth {
        let prev = terms.clone();
        let mut next: Vec<Term> = ["a", "b", "c"].into_iter().map(Term::atom).collect();
        for x in &prev {
            next.push(Term::app(GrammarCategory::Rel, "not", vec![x.clone()]));
            next.push(Term::app(GrammarCategory::Value, "useful", vec![x.clone()]));
        }
        for x in &prev {
            for y in &prev {
                next.push(Term::app(
                    GrammarCategory::Rel,
                    "implies",
                    vec![x.clone(), y.clone()],
                ));
            }
        }
        terms = next;
    }
    terms
}

type Path = Vec<usize>;

fn at<'t>(t: &'t Term, p: &[usize]) -> &'t Term {
    p.iter().fold(t, |t, &i| &t.children()[i])
}

fn heads_agree(x: &Term, y: &Term) -> bool {
    match (x, y) {
        (Term::Application(p), Term::Application(q)) => p.same_head(q),
        (Term::Set(p), Term::Set(q)) => p.len() == q.len(),
        _ => false,
    }
}

/// Positions present in both trees where every ancestor has agreeing heads.
fn common_positions(a: &Term, b: &Term, path: &mut Path, out: &mut Vec<Path>) {
    out.push(path.clone());
    let (x, y) = (at(a, path), at(b, path));
    if !heads_agree(x, y) {
        return;
    }
    for i in 0..x.children().len() {
        path.push(i);
        common_positions(a, b, path, out);
        path.pop();
    }
}

/// Every antichain of a position list.
fn antichains(positions: &[Path]) -> Vec<Vec<Path>> {
    let mut out = vec![Vec::new()];
    for p in positions {
        let mut more = Vec::new();
        for chain in &out {
            if chain
                .iter()
                .all(|q: &Path| !q.starts_with(p) && !p.starts_with(q))
            {
                let mut c = chain.clone();
                c.push(p.clone());
                more.push(c);
            }
        }
        out.extend(more);
    }
    out
}

fn replay(table: &BTreeMap<Term, Term>, shared: &BTreeSet<Term>, t: &Term) -> Option<Term> {
    if let Some(r) = table.get(t) {
        return Some(r.clone());
    }
    match t {
        Term::Application(app) => Some(Term::Application(Application {
            args: app
                .args
                .iter()
                .map(|x| replay(table, shared, x))
                .collect::<Option<_>>()?,
            ..app.clone()
        })),
        Term::Set(m) => Some(Term::Set(
            m.iter()
                .map(|x| replay(table, shared, x))
                .collect::<Option<_>>()?,
        )),
        leaf => shared.contains(leaf).then(|| leaf.clone()),
    }
}

fn is_partial_bijection(pairs: &[(&Term, &Term)]) -> bool {
    pairs
        .iter()
        .all(|(x, y)| pairs.iter().all(|(u, v)| (x == u) == (y == v)))
}

fn is_below_any(p: &Path, cuts: &[Path]) -> bool {
    cuts.iter().any(|c| p.starts_with(c))
}

/// Best matched-node count over every cut set whose pairs replay `a` into
/// `b` and back; `None` when no cut set does.
pub fn brute_force_matched(a: &Term, b: &Term) -> Option<usize> {
    if a.is_leaf() && b.is_leaf() {
        return Some(0);
    }
    if !heads_agree(a, b) {
        return None;
    }
    let mut positions = Vec::new();
    common_positions(a, b, &mut Path::new(), &mut positions);
    let non_root: Vec<Path> = positions
        .iter()
        .filter(|p| !p.is_empty())
        .cloned()
        .collect();
    let mut best = None;
    for cuts in antichains(&non_root) {
        let skeleton: Vec<&Path> = positions
            .iter()
            .filter(|p| !is_below_any(p, &cuts))
            .collect();
        if skeleton
            .iter()
            .any(|p| !heads_agree(at(a, p), at(b, p)) && at(a, p) != at(b, p))
        {
            continue;
        }
        // Every position above or at a cut pairs an `a` subterm with a
        // `b` subterm; together these pairs must be one-to-one.
        let related: Vec<(&Term, &Term)> = skeleton
            .iter()
            .copied()
            .chain(&cuts)
            .map(|p| (at(a, p), at(b, p)))
            .collect();
        if !is_partial_bijection(&related) {
            continue;
        }
        let forward: BTreeMap<Term, Term> = cuts
            .iter()
            .map(|p| (at(a, p).clone(), at(b, p).clone()))
            .collect();
        let backward: BTreeMap<Term, Term> = cuts
            .iter()
            .map(|p| (at(b, p).clone(), at(a, p).clone()))
            .collect();
        let shared: BTreeSet<Term> = skeleton
            .iter()
            .map(|p| at(a, p))
            .filter(|t| t.is_leaf())
            .cloned()
            .collect();
        if replay(&forward, &shared, a).as_ref() != Some(b)
            || replay(&backward, &shared, b).as_ref() != Some(a)
        {
            continue;
        }
        let matched = skeleton.iter().filter(|p| !at(a, p).is_leaf()).count();
        best = best.max(Some(matched));
    }
    best
}

/// Stanza bodies over registered tags with valid arities.
pub fn registered_content(depth: u32) -> impl Strategy<Value = Term> {
    let leaf =
        proptest::sample::select(vec!["p", "q", "r", "s", "perm_view", "Sn"]).prop_map(Term::atom);
    leaf.prop_recursive(depth.saturating_sub(1), 24, 2, |inner| {
        prop_oneof![
            inner
                .clone()
                .prop_map(|x| Term::app(GrammarCategory::Rel, "not", vec![x])),
            inner
                .clone()
                .prop_map(|x| Term::app(GrammarCategory::Meta, "goal", vec![x])),
            inner
                .clone()
                .prop_map(|x| Term::app(GrammarCategory::Value, "useful", vec![x])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::app(
                GrammarCategory::Rel,
                "implies",
                vec![x, y]
            )),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app(
                GrammarCategory::Struct,
                "used_in",
                vec![x, y]
            )),
        ]
    })
}

/// Anchored or analyst stanzas: `(anchor index, term)` where `None` marks
/// an analyst stanza.
pub fn stanza_specs(max: usize) -> impl Strategy<Value = Vec<(Option<usize>, Term)>> {
    let perf = proptest::sample::select(vec!["Assert", "Suggest", "Agree"]);
    let anchored = (0..4usize, perf, registered_content(4))
        .prop_map(|(i, tag, body)| (Some(i), Term::app(GrammarCategory::Perf, tag, vec![body])));
    let analyst = registered_content(3).prop_map(|t| (None, t));
    proptest::collection::vec(prop_oneof![3 => anchored, 1 => analyst], 0..max)
}

pub const LOCUTIONS: [&str; 4] = ["c1", "c2", "c3", "c4"];

pub fn small_dialogue() -> iatc::Dialogue {
    iatc::Dialogue::from_json(
        "small",
        r#"[
            {"id": "c1", "speaker": "a", "timestamp": "2011-07-19T08:05"},
            {"id": "c2", "speaker": "b", "timestamp": "2011-07-19T08:17", "parent": "c1"},
            {"id": "c3", "speaker": "a", "timestamp": "2011-07-19T09:02"},
            {"id": "c4", "speaker": "c", "timestamp": "2011-07-19T09:59"}
        ]"#,
    )
    .expect("valid dialogue")
}

pub fn to_stanzas(specs: &[(Option<usize>, Term)]) -> Vec<iatc::Stanza> {
    specs
        .iter()
        .map(|(anchor, t)| match anchor {
            Some(i) => iatc::Stanza::anchored(t.clone(), LOCUTIONS[*i]),
            None => iatc::Stanza::analyst(t.clone()),
        })
        .collect()
}
