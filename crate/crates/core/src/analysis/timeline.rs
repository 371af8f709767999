use chrono::{Duration, NaiveDateTime};

use super::AnalysisError;
use crate::dialogue::Dialogue;
use crate::parser::Stanza;
use crate::schema::TagRegistry;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineBin {
    pub start: NaiveDateTime,
    pub width_minutes: i64,
    /// Indexed by [`crate::schema::GrammarCategory::index`].
    pub per_category: [usize; 5],
}

impl TimelineBin {
    /// Last minute covered by the bin.
    pub fn last_minute(&self) -> NaiveDateTime {
        self.start + Duration::minutes(self.width_minutes - 1)
    }

    pub fn total(&self) -> usize {
        self.per_category.iter().sum()
    }
}

/// Bins anchored stanzas by their locution's timestamp.
///
/// `span` runs from its first to its last minute inclusive. Bins are
/// `bin_minutes` wide except the last, which absorbs the remainder, so
/// 8:05..9:59 at 5 minutes ends with a 9:50..9:59 bin. Unanchored stanzas
/// are skipped.
pub fn timeline<'a>(
    stanzas: impl IntoIterator<Item = &'a Stanza>,
    dialogue: &Dialogue,
    bin_minutes: u32,
    span: (NaiveDateTime, NaiveDateTime),
    registry: &TagRegistry,
) -> Result<Vec<TimelineBin>, AnalysisError> {
    if bin_minutes == 0 {
        return Err(AnalysisError::ZeroBinWidth);
    }
    let (start, end) = span;
    let length = (end - start).num_minutes();
    if length < 0 {
        return Err(AnalysisError::EmptySpan);
    }
    let w = i64::from(bin_minutes);
    let n = (length / w).max(1);
    let mut bins: Vec<TimelineBin> = (0..n)
        .map(|i| TimelineBin {
            start: start + Duration::minutes(i * w),
            width_minutes: if i == n - 1 { length + 1 - i * w } else { w },
            per_category: [0; 5],
        })
        .collect();

    for stanza in stanzas {
        let Some(anchor) = &stanza.anchor else {
            continue;
        };
        let loc = dialogue
            .get(anchor)
            .ok_or_else(|| AnalysisError::UnknownLocution(anchor.clone()))?;
        if loc.timestamp < start || loc.timestamp > end {
            return Err(AnalysisError::AnchorOutsideSpan(anchor.clone()));
        }
        let offset = (loc.timestamp - start).num_minutes();
        let bin = &mut bins[((offset / w) as usize).min(n as usize - 1)];
        let counts = super::count_tags([stanza], registry).per_category();
        for (cell, c) in bin.per_category.iter_mut().zip(counts) {
            *cell += c;
        }
    }
    Ok(bins)
}

/// Sum of the per-category columns across bins.
pub fn column_sums(bins: &[TimelineBin]) -> [usize; 5] {
    let mut out = [0; 5];
    for b in bins {
        for (o, c) in out.iter_mut().zip(b.per_category) {
            *o += c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::parse_timestamp;
    use crate::parser::parse_stanza;
    use crate::schema::{default_registry, GrammarCategory};

    fn t(hm: &str) -> NaiveDateTime {
        parse_timestamp(&format!("2011-07-19T{hm}")).unwrap()
    }

    fn dialogue(times: &[(&str, &str)]) -> Dialogue {
        let items: Vec<String> = times
            .iter()
            .map(|(id, hm)| {
                format!(r#"{{"id":"{id}","speaker":"s","timestamp":"2011-07-19T{hm}"}}"#)
            })
            .collect();
        Dialogue::from_json("d", &format!("[{}]", items.join(","))).unwrap()
    }

    #[test]
    fn bin_edges_with_wide_last_bin() {
        let d = dialogue(&[]);
        let bins = timeline([], &d, 5, (t("08:05"), t("09:59")), &default_registry()).unwrap();
        assert_eq!(bins.len(), 22);
        assert_eq!(
            (bins[0].start, bins[0].last_minute()),
            (t("08:05"), t("08:09"))
        );
        let last = bins.last().unwrap();
        assert_eq!(
            (last.start, last.last_minute(), last.width_minutes),
            (t("09:50"), t("09:59"), 10)
        );
        assert!(bins.iter().all(|b| b.total() == 0));
        for pair in bins.windows(2) {
            assert_eq!(
                pair[0].start + Duration::minutes(pair[0].width_minutes),
                pair[1].start
            );
        }
    }

    #[test]
    fn stanzas_land_in_their_bins() {
        let d = dialogue(&[("a", "08:07"), ("b", "09:55")]);
        let reg = default_registry();
        let s1 = Stanza::anchored(parse_stanza("perf[Assert](rel[not](x))").unwrap(), "a");
        let s2 = Stanza::anchored(parse_stanza("perf[Judge](value[useful](x))").unwrap(), "b");
        let s3 = Stanza::analyst(parse_stanza("struct[used_in](x, y)").unwrap());
        let bins = timeline([&s1, &s2, &s3], &d, 5, (t("08:05"), t("09:59")), &reg).unwrap();
        assert_eq!(bins[0].per_category, [1, 1, 0, 0, 0]);
        assert_eq!(bins[21].per_category[GrammarCategory::Value.index()], 1);
        assert_eq!(column_sums(&bins), [2, 1, 1, 0, 0]);
    }

    #[test]
    fn errors() {
        let d = dialogue(&[("a", "10:30")]);
        let reg = default_registry();
        let s = Stanza::anchored(parse_stanza("perf[Assert](x)").unwrap(), "a");
        let span = (t("08:05"), t("09:59"));
        assert!(matches!(
            timeline([&s], &d, 5, span, &reg),
            Err(AnalysisError::AnchorOutsideSpan(_))
        ));
        let s = Stanza::anchored(parse_stanza("perf[Assert](x)").unwrap(), "zz");
        assert!(matches!(
            timeline([&s], &d, 5, span, &reg),
            Err(AnalysisError::UnknownLocution(_))
        ));
        assert!(matches!(
            timeline([], &d, 0, span, &reg),
            Err(AnalysisError::ZeroBinWidth)
        ));
        assert!(matches!(
            timeline([], &d, 5, (span.1, span.0), &reg),
            Err(AnalysisError::EmptySpan)
        ));
    }

    #[test]
    fn short_span_is_one_bin() {
        let bins = timeline(
            [],
            &dialogue(&[]),
            5,
            (t("08:05"), t("08:07")),
            &default_registry(),
        )
        .unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].width_minutes, 3);
    }
}
