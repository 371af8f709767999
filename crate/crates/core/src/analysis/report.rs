use std::collections::BTreeMap;
use std::io::Write;

use super::{CommentLabel, TagCounts, TimelineBin};

pub const TIMELINE_HEADER: [&str; 7] = [
    "bin_start",
    "width_minutes",
    "perf",
    "rel",
    "value",
    "meta",
    "struct",
];
pub const COUNTS_HEADER: [&str; 3] = ["category", "tag", "count"];
pub const COMPOSITION_HEADER: [&str; 4] = ["label", "category", "tag", "count"];

const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M";

/// `bin_start,width_minutes,perf,rel,value,meta,struct`
pub fn write_timeline_csv(out: impl Write, bins: &[TimelineBin]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMELINE_HEADER)?;
    for b in bins {
        let mut row = vec![
            b.start.format(TIME_FORMAT).to_string(),
            b.width_minutes.to_string(),
        ];
        row.extend(b.per_category.iter().map(ToString::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `category,tag,count`, one row per non-zero cell.
pub fn write_counts_csv(out: impl Write, counts: &TagCounts) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTS_HEADER)?;
    for (c, tag, n) in counts.iter() {
        w.write_record([c.as_str(), tag, &n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `label,category,tag,count`
pub fn write_composition_csv(
    out: impl Write,
    composition: &BTreeMap<CommentLabel, TagCounts>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPOSITION_HEADER)?;
    for (label, counts) in composition {
        for (c, tag, n) in counts.iter() {
            w.write_record([label.as_str(), c.as_str(), tag, &n.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
