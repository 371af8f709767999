//! Acceptance criteria, one PASS/FAIL line each. Runs without the test
//! harness so the report is always printed.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use iatc::analogy::AnalogyError;
use iatc::analysis::{category_composition, column_sums, label_shares, timeline, CommentLabels};
use iatc::dialogue::parse_timestamp;
use iatc::parser::{print_stanza, validate_document};
use iatc::{
    align, apply_mapping, build_graph, count_tags, default_registry, parse_annotation_file,
    parse_stanza, Dialogue, GrammarCategory, Term,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{all_small_terms, brute_force_matched, corpus};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden_corpus() -> Outcome {
    let reg = default_registry();
    let started = Instant::now();
    let mut summary = Vec::new();
    for name in [
        "tag_examples.iatc",
        "perm_view_opening.iatc",
        "windmill_problem.iatc",
        "windmill.iatc",
        "perm_view.iatc",
    ] {
        let doc = parse_annotation_file(&corpus(name)).map_err(|e| format!("{name}: {e}"))?;
        let diags = validate_document(&doc, &reg);
        let errors: Vec<String> = diags
            .iter()
            .filter(|d| d.is_error())
            .map(|d| d.to_string())
            .collect();
        check(errors.is_empty(), format!("{name}: {}", errors.join("; ")))?;
        let warnings = diags.len();
        summary.push(format!(
            "{name} {} stanzas/{warnings} warnings",
            doc.all_stanzas().count()
        ));
    }
    let elapsed = started.elapsed();
    check(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("{} in {elapsed:?}", summary.join(", ")))
}

fn stronger_not_counting() -> Outcome {
    let reg = default_registry();
    let doc = parse_annotation_file(
        "#!iatc 1\n@locution c1\nperf[assert](rel[stronger](rel[not](prove_rtf), rel[not](random_test_false)))\n",
    )
    .map_err(|e| e.to_string())?;
    let c = count_tags(doc.all_stanzas(), &reg);
    let cells: Vec<(GrammarCategory, &str, usize)> = c.iter().collect();
    let expected = vec![
        (GrammarCategory::Perf, "Assert", 1),
        (GrammarCategory::Rel, "implies", 1),
        (GrammarCategory::Rel, "not", 2),
    ];
    check(cells == expected, format!("cells {cells:?}"))?;
    check(
        c.alias_count("stronger") == 1,
        "stronger alias not recorded",
    )?;
    Ok("Assert=1 implies(stronger)=1 not=2".into())
}

fn problem_block_structural() -> Outcome {
    let reg = default_registry();
    let doc = parse_annotation_file(&corpus("windmill_problem.iatc")).map_err(|e| e.to_string())?;
    let c = count_tags(doc.all_stanzas(), &reg);
    let n = c.get(GrammarCategory::Struct, "used_in");
    check(
        n == 8 && c.total() == 8,
        format!("used_in={n} total={}", c.total()),
    )?;
    Ok(format!(
        "used_in={n}, structural alias={}",
        c.alias_count("structural")
    ))
}

fn perm_view_graph() -> Outcome {
    let reg = default_registry();
    let doc = parse_annotation_file(&corpus("perm_view.iatc")).map_err(|e| e.to_string())?;
    let dialogue =
        Dialogue::from_json("perm_view", &corpus("perm_view.json")).map_err(|e| e.to_string())?;
    let g = build_graph(doc.all_stanzas(), Some(&dialogue), &reg).map_err(|e| e.to_string())?;
    let text = |n: usize| g.node(n).kind.label();
    let pairs = |tag: &str| -> BTreeSet<(String, String)> {
        g.relation_pairs(GrammarCategory::Struct, tag)
            .into_iter()
            .map(|(a, b)| (text(a), text(b)))
            .collect()
    };
    let owned = |v: &[(&str, &str)]| -> BTreeSet<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    let used_in = owned(&[
        ("ai", "problem"),
        ("ai", "perm_view"),
        ("Sn", "perm_view"),
        ("Sn", "problem"),
        ("Sn", "perm_view_mod"),
        ("a1", "perm_view_mod"),
        ("n", "strong_ind_n"),
        ("n", "Sn"),
        ("a1_ex", "a1_in_M"),
    ]);
    check(
        pairs("used_in") == used_in,
        format!("used_in {:?}", pairs("used_in")),
    )?;
    check(
        pairs("reform") == owned(&[("perm_view", "perm_view_mod")]),
        format!("reform {:?}", pairs("reform")),
    )?;
    let components = g.components().count;
    check(components == 1, format!("{components} components"))?;
    Ok(format!(
        "{} nodes, {} edges, 1 component",
        g.node_count(),
        g.edge_count()
    ))
}

fn timeline_bins() -> Outcome {
    let reg = default_registry();
    let t = |hm: &str| parse_timestamp(&format!("2011-07-19T{hm}")).expect("timestamp");
    let dialogue = Dialogue::from_json("empty", "[]").map_err(|e| e.to_string())?;
    let bins =
        timeline([], &dialogue, 5, (t("08:05"), t("09:59")), &reg).map_err(|e| e.to_string())?;
    let first = &bins[0];
    let last = bins.last().expect("bins");
    check(
        first.start == t("08:05") && first.last_minute() == t("08:09"),
        "first bin",
    )?;
    check(
        last.start == t("09:50") && last.last_minute() == t("09:59") && last.width_minutes == 10,
        format!("last bin {} width {}", last.start, last.width_minutes),
    )?;
    check(bins.len() == 22, format!("{} bins", bins.len()))?;
    Ok("8:05-8:09 first, 9:50-9:59 last (10 min), 22 bins".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7c);
    for i in 0..1000 {
        let term = common::random_term(&mut rng, 6);
        let first = print_stanza(&term);
        let reparsed = parse_stanza(&first).map_err(|e| format!("#{i} `{first}`: {e}"))?;
        let second = print_stanza(&reparsed);
        check(
            first == second,
            format!("#{i}: `{first}` became `{second}`"),
        )?;
    }
    Ok("1000 terms, depth <= 6".into())
}

fn analogy_oracle() -> Outcome {
    let terms = all_small_terms(3);
    check(terms.len() == 363, format!("{} terms", terms.len()))?;
    let mut aligned = 0usize;
    for a in &terms {
        for b in &terms {
            let expected = brute_force_matched(a, b);
            match (align(a, b), expected) {
                (Ok(m), Some(best)) => {
                    check(
                        m.matched == best,
                        format!("{a} ~ {b}: matched {} vs oracle {best}", m.matched),
                    )?;
                    check(
                        apply_mapping(&m, a).as_ref() == Ok(b),
                        format!("{a} ~ {b}: replay"),
                    )?;
                    aligned += 1;
                }
                (Err(AnalogyError::NoAlignment), None) => {}
                (got, want) => return Err(format!("{a} ~ {b}: align {got:?}, oracle {want:?}")),
            }
        }
    }
    let p1 = parse_annotation_file(&corpus("coset_finite.iatc")).map_err(|e| e.to_string())?;
    let p2 = parse_annotation_file(&corpus("coset_infinite.iatc")).map_err(|e| e.to_string())?;
    let (a, b): (&Term, &Term) = (&p1.stanzas[0].term, &p2.stanzas[0].term);
    let m = align(a, b).map_err(|e| e.to_string())?;
    let pair = (Term::atom("finite_group"), Term::atom("infinite_group"));
    check(
        m.pairs == vec![pair],
        format!("finite/infinite pairs {:?}", m.pairs),
    )?;
    check(
        apply_mapping(&m, a).as_ref() == Ok(b),
        "finite/infinite replay",
    )?;
    Ok(format!(
        "{} pairs, {aligned} aligned; finite/infinite -> (finite_group, infinite_group)",
        terms.len().pow(2)
    ))
}

fn composition_properties() -> Outcome {
    let reg = default_registry();
    let doc = parse_annotation_file(&corpus("windmill.iatc")).map_err(|e| e.to_string())?;
    let labels = CommentLabels::from_csv(corpus("windmill_labels.csv").as_bytes())
        .map_err(|e| e.to_string())?;
    let dialogue =
        Dialogue::from_json("windmill", &corpus("windmill.json")).map_err(|e| e.to_string())?;
    let comp = category_composition(doc.all_stanzas(), &labels, &reg).map_err(|e| e.to_string())?;
    let anchored: Vec<_> = doc.all_stanzas().filter(|s| s.anchor.is_some()).collect();
    let whole = count_tags(anchored.iter().copied(), &reg);
    let summed = comp
        .values()
        .fold(iatc::TagCounts::new(), |acc, c| acc + c.clone());
    check(
        summed == whole,
        "composition does not partition the anchored counts",
    )?;
    let shares = label_shares(&labels).map_err(|e| e.to_string())?;
    check(
        (shares.values().sum::<f64>() - 1.0).abs() < 1e-12,
        "shares do not sum to one",
    )?;
    let span = dialogue.time_span().expect("non-empty dialogue");
    let bins =
        timeline(anchored.iter().copied(), &dialogue, 5, span, &reg).map_err(|e| e.to_string())?;
    check(
        column_sums(&bins) == whole.per_category(),
        "timeline columns do not sum to the counts",
    )?;
    Ok(
        "full-corpus shares not reproducible; partition, share and column-sum invariants hold"
            .into(),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden corpus parses and validates", golden_corpus),
        (
            "counting rule on the stronger/not stanza",
            stronger_not_counting,
        ),
        (
            "problem-statement structural count",
            problem_block_structural,
        ),
        ("permutation-view graph structure", perm_view_graph),
        ("timeline bin edges", timeline_bins),
        ("print/parse round trip", round_trip),
        ("analogy oracle equivalence", analogy_oracle),
        ("composition pipeline invariants", composition_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why})", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
