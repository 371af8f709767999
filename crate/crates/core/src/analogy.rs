//! Structural alignment of two expression trees by anti-unification.
//!
//! An alignment cuts both trees at the same positions. Above the cuts the
//! trees agree node for node and form the skeleton; each cut becomes a
//! placeholder paired with the two subterms found there. Equal pairs
//! share a placeholder, and the pairs must form a partial bijection so
//! that the mapping can be replayed on `a` to recover `b`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write;

use thiserror::Error;

use crate::term::{Atom, Term};

type Path = Vec<usize>;
type CutSet = BTreeSet<Path>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyMapping {
    /// Distinct (subterm of `a`, subterm of `b`) pairs; pair `i` fills
    /// placeholder `i + 1`.
    pub pairs: Vec<(Term, Term)>,
    /// The common structure with placeholder atoms at the cuts.
    pub skeleton: Term,
    pub placeholders: Vec<String>,
    /// Applications and sets shared by both trees.
    pub matched: usize,
    /// Larger of the two trees' application-and-set counts.
    pub size: usize,
}

impl AnalogyMapping {
    /// `matched / size`; two bare leaves score 1.
    pub fn score(&self) -> f64 {
        if self.size == 0 {
            1.0
        } else {
            self.matched as f64 / self.size as f64
        }
    }

    /// The same alignment read from `b` to `a`.
    pub fn flipped(&self) -> AnalogyMapping {
        AnalogyMapping {
            pairs: self
                .pairs
                .iter()
                .map(|(l, r)| (r.clone(), l.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Atom pairs only, dropping placeholders that absorbed whole subtrees.
    pub fn atom_pairs(&self) -> Vec<(&Atom, &Atom)> {
        self.pairs
            .iter()
            .filter_map(|(l, r)| match (l, r) {
                (Term::Atom(x), Term::Atom(y)) => Some((x, y)),
                _ => None,
            })
            .collect()
    }

    /// Leaves kept verbatim in the skeleton.
    fn shared_leaves(&self) -> BTreeSet<&Term> {
        self.skeleton
            .walk()
            .filter(|t| t.is_leaf())
            .filter(|t| !matches!(t, Term::Atom(a) if self.placeholders.iter().any(|p| p == a.as_str())))
            .collect()
    }

    /// Two-column pair table, then the skeleton and score.
    pub fn report(&self) -> String {
        let left: Vec<String> = self.pairs.iter().map(|(l, _)| l.to_string()).collect();
        let width = left.iter().map(String::len).chain([1]).max().unwrap_or(1);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  B", "A");
        for ((_, r), l) in self.pairs.iter().zip(&left) {
            let _ = writeln!(out, "{l:<width$}  {r}");
        }
        let _ = writeln!(out, "skeleton: {}", self.skeleton);
        let _ = writeln!(
            out,
            "score: {}/{} ({:.3})",
            self.matched,
            self.size,
            self.score()
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalogyError {
    #[error("no alignment: the roots differ or no consistent mapping exists")]
    NoAlignment,
    #[error("atom `{0}` is neither mapped nor shared")]
    UnmappedAtom(String),
}

/// Replaces, top-down, every subterm equal to a left side with its
/// partner. Leaves must be mapped or shared with the skeleton.
pub fn apply_mapping(m: &AnalogyMapping, t: &Term) -> Result<Term, AnalogyError> {
    let table: BTreeMap<&Term, &Term> = m.pairs.iter().map(|(l, r)| (l, r)).collect();
    let shared = m.shared_leaves();
    apply(&table, &shared, t)
}

fn apply(
    table: &BTreeMap<&Term, &Term>,
    shared: &BTreeSet<&Term>,
    t: &Term,
) -> Result<Term, AnalogyError> {
    if let Some(r) = table.get(t) {
        return Ok((*r).clone());
    }
    match t {
        leaf if leaf.is_leaf() => {
            if shared.contains(leaf) {
                Ok(leaf.clone())
            } else {
                Err(AnalogyError::UnmappedAtom(leaf.to_string()))
            }
        }
        Term::Application(app) => {
            let args = app
                .args
                .iter()
                .map(|a| apply(table, shared, a))
                .collect::<Result<_, _>>()?;
            Ok(Term::Application(crate::term::Application {
                args,
                ..app.clone()
            }))
        }
        Term::Set(members) => Ok(Term::Set(
            members
                .iter()
                .map(|m| apply(table, shared, m))
                .collect::<Result<_, _>>()?,
        )),
        _ => unreachable!(),
    }
}

/// Whether two nodes agree at the top: same application head and arity,
/// or sets of equal size.
fn same_head(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Application(x), Term::Application(y)) => x.same_head(y),
        (Term::Set(x), Term::Set(y)) => x.len() == y.len(),
        _ => false,
    }
}

struct Pair<'t> {
    a: &'t Term,
    b: &'t Term,
}

impl<'t> Pair<'t> {
    fn at(&self, p: &[usize]) -> (&'t Term, &'t Term) {
        (
            self.a.at(p).expect("path in a"),
            self.b.at(p).expect("path in b"),
        )
    }

    /// Topmost positions where the trees disagree.
    fn mismatches(&self, path: &mut Path, out: &mut CutSet) {
        let (x, y) = self.at(path);
        if x == y && x.is_leaf() {
            return;
        }
        if !same_head(x, y) {
            out.insert(path.clone());
            return;
        }
        for i in 0..x.children().len() {
            path.push(i);
            self.mismatches(path, out);
            path.pop();
        }
    }

    /// Positions neither cut nor below a cut, in pre-order.
    fn skeleton_positions(&self, cuts: &CutSet) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack = vec![Path::new()];
        while let Some(p) = stack.pop() {
            if cuts.contains(&p) {
                continue;
            }
            let n = self.a.at(&p).expect("path in a").children().len();
            for i in (0..n).rev() {
                let mut c = p.clone();
                c.push(i);
                stack.push(c);
            }
            out.push(p);
        }
        out
    }

    fn matched(&self, cuts: &CutSet) -> usize {
        self.skeleton_positions(cuts)
            .iter()
            .filter(|p| !self.a.at(p).expect("path").is_leaf())
            .count()
    }

    /// First pair of positions that breaks the bijection, if any. A cut
    /// `p` conflicts with another cut or skeleton position `r` when the
    /// subterms at `r` equal those at `p` on one side only.
    fn conflict(&self, cuts: &CutSet) -> Option<(Path, Path, bool)> {
        let cut_list: Vec<&Path> = cuts.iter().collect();
        for (i, p) in cut_list.iter().enumerate() {
            let (pa, pb) = self.at(p);
            for q in &cut_list[i + 1..] {
                let (qa, qb) = self.at(q);
                if (pa == qa) != (pb == qb) {
                    return Some(((*p).clone(), (*q).clone(), true));
                }
            }
        }
        for r in self.skeleton_positions(cuts) {
            let (ra, rb) = self.at(&r);
            for p in &cut_list {
                let (pa, pb) = self.at(p);
                if (pa == ra) != (pb == rb) {
                    return Some(((*p).clone(), r, false));
                }
            }
        }
        None
    }

    fn mapping(&self, cuts: &CutSet) -> AnalogyMapping {
        let prefix = placeholder_prefix(self.a, self.b);
        let mut pairs: Vec<(Term, Term)> = Vec::new();
        let mut slot_of: BTreeMap<&Path, usize> = BTreeMap::new();
        for p in cuts {
            let (x, y) = self.at(p);
            let i = match pairs.iter().position(|(l, r)| l == x && r == y) {
                Some(i) => i,
                None => {
                    pairs.push((x.clone(), y.clone()));
                    pairs.len() - 1
                }
            };
            slot_of.insert(p, i);
        }
        let placeholders: Vec<String> = (1..=pairs.len()).map(|i| format!("{prefix}{i}")).collect();
        let skeleton = build_skeleton(self.a, &mut Path::new(), &slot_of, &placeholders);
        AnalogyMapping {
            pairs,
            skeleton,
            placeholders,
            matched: self.matched(cuts),
            size: self.a.structural_size().max(self.b.structural_size()),
        }
    }
}

fn build_skeleton(
    t: &Term,
    path: &mut Path,
    slot_of: &BTreeMap<&Path, usize>,
    names: &[String],
) -> Term {
    if let Some(&i) = slot_of.get(path) {
        return Term::atom(&names[i]);
    }
    let child = |i: usize, c: &Term, path: &mut Path| {
        path.push(i);
        let out = build_skeleton(c, path, slot_of, names);
        path.pop();
        out
    };
    match t {
        Term::Application(app) => {
            let args = app
                .args
                .iter()
                .enumerate()
                .map(|(i, c)| child(i, c, path))
                .collect();
            Term::Application(crate::term::Application {
                args,
                ..app.clone()
            })
        }
        Term::Set(members) => Term::Set(
            members
                .iter()
                .enumerate()
                .map(|(i, c)| child(i, c, path))
                .collect(),
        ),
        leaf => leaf.clone(),
    }
}

/// A run of `?` that starts no atom in either tree.
fn placeholder_prefix(a: &Term, b: &Term) -> String {
    let mut prefix = String::from("?");
    while a
        .atoms()
        .chain(b.atoms())
        .any(|x| x.as_str().starts_with(&prefix))
    {
        prefix.push('?');
    }
    prefix
}

/// Replaces every cut under `anchor` by a single cut at `anchor`.
fn cut_at(cuts: &CutSet, anchor: Path) -> CutSet {
    let mut next: CutSet = cuts
        .iter()
        .filter(|c| !c.starts_with(&anchor))
        .cloned()
        .collect();
    next.insert(anchor);
    next
}

fn lift(cuts: &CutSet, p: &Path) -> Option<CutSet> {
    if p.len() <= 1 {
        return None;
    }
    Some(cut_at(cuts, p[..p.len() - 1].to_vec()))
}

/// Most specific consistent alignment of `a` and `b`.
///
/// Roots must agree unless both are leaves. The search starts from the
/// finest cut set and coarsens it one conflict at a time, always
/// expanding the candidate with the most matched nodes (ties broken by
/// cut positions), so the result is optimal and symmetric in `a`, `b`.
pub fn align(a: &Term, b: &Term) -> Result<AnalogyMapping, AnalogyError> {
    let pair = Pair { a, b };
    if a.is_leaf() && b.is_leaf() {
        let cuts: CutSet = if a == b {
            CutSet::new()
        } else {
            CutSet::from([Path::new()])
        };
        return Ok(pair.mapping(&cuts));
    }
    if !same_head(a, b) {
        return Err(AnalogyError::NoAlignment);
    }
    let mut start = CutSet::new();
    pair.mismatches(&mut Path::new(), &mut start);

    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = BinaryHeap::from([(pair.matched(&start), Reverse(start))]);
    while let Some((_, Reverse(cuts))) = queue.pop() {
        let Some((p, r, r_is_cut)) = pair.conflict(&cuts) else {
            return Ok(pair.mapping(&cuts));
        };
        let other = if r_is_cut {
            lift(&cuts, &r)
        } else {
            Some(cut_at(&cuts, r))
        };
        for next in [lift(&cuts, &p), other].into_iter().flatten() {
            if seen.insert(next.clone()) {
                queue.push((pair.matched(&next), Reverse(next)));
            }
        }
    }
    Err(AnalogyError::NoAlignment)
}

/// Aligns two stanza lists position by position as one unit.
pub fn align_lists(a: &[Term], b: &[Term]) -> Result<AnalogyMapping, AnalogyError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(AnalogyError::NoAlignment);
    }
    align(&Term::Set(a.to_vec()), &Term::Set(b.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_stanza;

    fn t(s: &str) -> Term {
        parse_stanza(s).unwrap()
    }

    fn round_trip(a: &Term, b: &Term) -> AnalogyMapping {
        let m = align(a, b).unwrap();
        assert_eq!(&apply_mapping(&m, a).unwrap(), b);
        assert_eq!(&apply_mapping(&m.flipped(), b).unwrap(), a);
        m
    }

    #[test]
    fn identity() {
        let a = t("perf[Assert](rel[implies](x, rel[not](y)))");
        let m = round_trip(&a, &a);
        assert!(m.pairs.is_empty());
        assert_eq!(m.score(), 1.0);
        assert_eq!(m.skeleton, a);
    }

    #[test]
    fn renaming_scores_one() {
        let m = round_trip(
            &t("rel[implies](a, rel[not](b))"),
            &t("rel[implies](c, rel[not](d))"),
        );
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(m.score(), 1.0);
        assert_eq!(m.skeleton.to_string(), "rel[implies](?1, rel[not](?2))");
    }

    #[test]
    fn root_mismatch() {
        assert_eq!(
            align(&t("rel[implies](a, b)"), &t("value[useful](a)")),
            Err(AnalogyError::NoAlignment)
        );
        assert_eq!(
            align(&t("rel[not](a)"), &t("a")),
            Err(AnalogyError::NoAlignment)
        );
    }

    #[test]
    fn subtree_absorbed_by_placeholder() {
        let m = round_trip(&t("rel[implies](rel[not](a), b)"), &t("rel[implies](c, b)"));
        assert_eq!(m.pairs, vec![(t("rel[not](a)"), t("c"))]);
        assert_eq!((m.matched, m.size), (1, 2));
    }

    #[test]
    fn repeated_atoms_share_a_placeholder() {
        let m = round_trip(
            &t("rel[implies](a, rel[not](a))"),
            &t("rel[implies](b, rel[not](b))"),
        );
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.skeleton.to_string(), "rel[implies](?1, rel[not](?1))");
    }

    #[test]
    fn bijection_forces_coarser_cut() {
        // a -> b and a -> c cannot both hold, so one cut is lifted.
        let m = round_trip(
            &t("rel[implies](rel[not](a), a)"),
            &t("rel[implies](rel[not](b), c)"),
        );
        assert_eq!(m.matched, 1);
        assert_eq!(
            m.pairs,
            vec![(t("rel[not](a)"), t("rel[not](b)")), (t("a"), t("c"))]
        );
        let a = t("rel[implies](rel[not](a), rel[not](a))");
        assert_eq!(
            align(&a, &t("rel[implies](rel[not](b), rel[not](c))")),
            Err(AnalogyError::NoAlignment)
        );
        // a shared leaf must not also be a left side.
        let m = round_trip(
            &t("rel[implies](a, rel[not](a))"),
            &t("rel[implies](b, rel[not](a))"),
        );
        assert_eq!(m.matched, 1);
        assert_eq!(
            align(&t("rel[implies](a, a)"), &t("rel[implies](b, a)")),
            Err(AnalogyError::NoAlignment)
        );
    }

    #[test]
    fn leaves() {
        assert_eq!(round_trip(&t("x"), &t("y")).pairs, vec![(t("x"), t("y"))]);
        assert!(round_trip(&t("x"), &t("x")).pairs.is_empty());
    }

    #[test]
    fn placeholder_names_avoid_atoms() {
        let m = round_trip(&t("rel[implies](?1, a)"), &t("rel[implies](?1, b)"));
        assert_eq!(m.skeleton.to_string(), "rel[implies](?1, ??1)");
    }

    #[test]
    fn unmapped_atom() {
        let m = align(&t("rel[not](a)"), &t("rel[not](b)")).unwrap();
        assert_eq!(
            apply_mapping(&m, &t("rel[not](z)")),
            Err(AnalogyError::UnmappedAtom("z".into()))
        );
        let empty = align(&t("rel[not](a)"), &t("rel[not](a)")).unwrap();
        assert_eq!(
            apply_mapping(&empty, &t("rel[not](a)")).unwrap(),
            t("rel[not](a)")
        );
    }

    #[test]
    fn lists_align_by_position() {
        let m = align_lists(
            &[t("rel[not](a)"), t("value[useful](b)")],
            &[t("rel[not](c)"), t("value[useful](b)")],
        )
        .unwrap();
        assert_eq!(m.pairs, vec![(t("a"), t("c"))]);
        assert!(align_lists(&[t("a")], &[]).is_err());
    }

    #[test]
    fn report_layout() {
        let m = align(&t("rel[not](finite_group)"), &t("rel[not](infinite_group)")).unwrap();
        assert_eq!(
            m.report(),
            "A             B\nfinite_group  infinite_group\nskeleton: rel[not](?1)\nscore: 1/1 (1.000)\n"
        );
    }
}
