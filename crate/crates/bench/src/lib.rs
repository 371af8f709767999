//! Synthetic workloads shared by the benchmarks.

use std::fmt::Write;

const TEMPLATES: [&str; 6] = [
    "perf[Assert](rel[implies](rel[not](p{a}), rel[not](q{b})))",
    "perf[Suggest](meta[strategy](goal{a}, method{b}))",
    "perf[Judge](value[useful](p{a}))",
    "perf[Assert](rel[has_property](obj{b}, prop{a}))",
    "perf[Query](rel[equivalent](p{a}, q{b}))",
    "perf[Agree](meta[goal](q{b}))",
];

/// An annotation file with `n` anchored stanzas spread over `n / 4 + 1`
/// locutions, every fifth followed by an analyst `used_in` link, plus the
/// matching dialogue JSON.
pub fn synthetic_corpus(n: usize) -> (String, String) {
    let locutions = n / 4 + 1;
    let mut ann = String::from("#!iatc 1\n");
    for i in 0..n {
        let (a, b) = (i % 97, (i * 7) % 89);
        let _ = writeln!(ann, "@locution c{}", i / 4);
        let line = TEMPLATES[i % TEMPLATES.len()]
            .replace("{a}", &a.to_string())
            .replace("{b}", &b.to_string());
        ann.push_str(&line);
        ann.push('\n');
        if i % 5 == 0 {
            let _ = writeln!(ann, "@analyst\nstruct[used_in](p{a}, q{b})");
        }
    }
    let items: Vec<String> = (0..locutions)
        .map(|i| {
            let (h, m) = (8 + i / 60, i % 60);
            format!(
                r#"{{"id":"c{i}","speaker":"s{}","timestamp":"2011-07-19T{h:02}:{m:02}"}}"#,
                i % 7
            )
        })
        .collect();
    (ann, format!("[{}]", items.join(",")))
}

/// Two full binary `implies` trees of the given depth whose leaves differ
/// by a renaming.
pub fn renamed_pair(depth: usize) -> (String, String) {
    fn tree(depth: usize, next: &mut usize, prefix: &str) -> String {
        if depth == 0 {
            *next += 1;
            return format!("{prefix}{}", *next % 5);
        }
        let l = tree(depth - 1, next, prefix);
        let r = tree(depth - 1, next, prefix);
        format!("rel[implies]({l}, rel[not]({r}))")
    }
    (tree(depth, &mut 0, "x"), tree(depth, &mut 0, "y"))
}
