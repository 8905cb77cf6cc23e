use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use super::evaluate::MetricRecord;
use super::stats::{box_stats, BoxStats};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["track_id", "source", "transform", "wdo", "psr", "sir", "gini"];

/// Source key under which full-mixture statistics are filed.
pub const MIX_SOURCE: &str = "mix";

/// metric → transform → source → statistics.
pub type StatsReport = BTreeMap<String, BTreeMap<String, BTreeMap<String, BoxStats>>>;

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        v.to_string()
    }
}

fn parse_value(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("line {line}: `{field}` is not a number")))
}

/// Writes records as CSV. Infinite SIR is written as `inf`, an undefined
/// Gini index as `nan`.
pub fn write_records_csv<W: Write>(out: W, records: &[MetricRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.track_id.clone(),
            r.source.to_string(),
            r.transform.to_string(),
            fmt_value(r.wdo),
            fmt_value(r.psr),
            fmt_value(r.sir),
            fmt_value(r.gini.unwrap_or(f64::NAN)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<MetricRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Format(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or_default();
        let gini = parse_value(field(6), line)?;
        records.push(MetricRecord {
            track_id: field(0).to_string(),
            source: field(1)
                .parse()
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?,
            transform: field(2)
                .parse()
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?,
            wdo: parse_value(field(3), line)?,
            psr: parse_value(field(4), line)?,
            sir: parse_value(field(5), line)?,
            gini: (!gini.is_nan()).then_some(gini),
        });
    }
    Ok(records)
}

/// Box statistics of WDO, PSR and SIR per (transform, source) and of the
/// full-mixture Gini index per transform (source key [`MIX_SOURCE`], one
/// value per track). Non-finite values are left out; groups with no finite
/// value are omitted.
pub fn summarize(records: &[MetricRecord]) -> Result<StatsReport> {
    let mut groups: BTreeMap<(&str, String, String), Vec<f64>> = BTreeMap::new();
    let mut gini_seen = std::collections::BTreeSet::new();
    for r in records {
        let t = r.transform.to_string();
        let s = r.source.to_string();
        for (metric, v) in [("wdo", r.wdo), ("psr", r.psr), ("sir", r.sir)] {
            groups.entry((metric, t.clone(), s.clone())).or_default().push(v);
        }
        if gini_seen.insert((r.track_id.as_str(), r.transform)) {
            if let Some(g) = r.gini {
                groups.entry(("gini", t, MIX_SOURCE.into())).or_default().push(g);
            }
        }
    }
    let mut report = StatsReport::new();
    for ((metric, t, s), values) in groups {
        let finite: Vec<f64> = values.into_iter().filter(|v| v.is_finite()).collect();
        if finite.is_empty() {
            continue;
        }
        report
            .entry(metric.to_string())
            .or_default()
            .entry(t)
            .or_default()
            .insert(s, box_stats(&finite)?);
    }
    Ok(report)
}

/// Plain-text table of mean WDO per source and transform, followed by the
/// mean full-mixture Gini index per transform.
pub fn summary_table(report: &StatsReport) -> String {
    let mut out = String::new();
    let empty = BTreeMap::new();
    let wdo = report.get("wdo").unwrap_or(&empty);
    let transforms: Vec<&String> = wdo.keys().collect();
    let _ = write!(out, "{:<10}", "WDO");
    for t in &transforms {
        let _ = write!(out, "{t:>10}");
    }
    out.push('\n');
    let mut sources: Vec<&String> = wdo.values().flat_map(|m| m.keys()).collect();
    sources.sort();
    sources.dedup();
    for s in sources {
        let _ = write!(out, "{s:<10}");
        for t in &transforms {
            match wdo[*t].get(s) {
                Some(b) => {
                    let _ = write!(out, "{:>10.4}", b.mean);
                }
                None => {
                    let _ = write!(out, "{:>10}", "-");
                }
            }
        }
        out.push('\n');
    }
    if let Some(gini) = report.get("gini") {
        let _ = write!(out, "{:<10}", "GI (mix)");
        for t in &transforms {
            match gini.get(*t).and_then(|m| m.get(MIX_SOURCE)) {
                Some(b) => {
                    let _ = write!(out, "{:>10.4}", b.mean);
                }
                None => {
                    let _ = write!(out, "{:>10}", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceLabel;
    use crate::filterbanks::TransformId;

    fn rec(track: &str, source: SourceLabel, transform: TransformId, wdo: f64, sir: f64, gini: Option<f64>) -> MetricRecord {
        MetricRecord {
            track_id: track.into(),
            source,
            transform,
            wdo,
            psr: wdo,
            sir,
            gini,
        }
    }

    #[test]
    fn csv_round_trip_with_sentinels() {
        let records = vec![
            rec("a, quoted \"one\"", SourceLabel::Bass, TransformId::Mdct, 0.1, f64::INFINITY, None),
            rec("b", SourceLabel::Vocals, TransformId::Stft, 1.0 / 3.0, 2.5, Some(0.25)),
        ];
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("track_id,source,transform,wdo,psr,sir,gini\n"));
        assert!(text.contains(",inf,nan\n"));
        assert_eq!(read_records_csv(&buf[..]).unwrap(), records);
    }

    #[test]
    fn malformed_csv() {
        assert!(read_records_csv(&b"a,b\n1,2\n"[..]).is_err());
        let bad = b"track_id,source,transform,wdo,psr,sir,gini\nx,bass,mdct,oops,0,1,0\n";
        assert!(read_records_csv(&bad[..]).is_err());
        let bad = b"track_id,source,transform,wdo,psr,sir,gini\nx,piano,mdct,0,0,1,0\n";
        assert!(read_records_csv(&bad[..]).is_err());
    }

    #[test]
    fn grouping() {
        let records = vec![
            rec("a", SourceLabel::Bass, TransformId::Mdct, 0.5, 2.0, Some(0.4)),
            rec("a", SourceLabel::Drums, TransformId::Mdct, 0.7, f64::INFINITY, Some(0.4)),
            rec("b", SourceLabel::Bass, TransformId::Mdct, 0.9, 3.0, Some(0.6)),
            rec("b", SourceLabel::Drums, TransformId::Mdct, 0.1, f64::INFINITY, Some(0.6)),
        ];
        let report = summarize(&records).unwrap();
        let bass = &report["wdo"]["mdct"]["bass"];
        assert_eq!((bass.n, bass.mean), (2, 0.7));
        let gini = &report["gini"]["mdct"][MIX_SOURCE];
        assert_eq!(gini.n, 2);
        assert!((gini.mean - 0.5).abs() < 1e-15);
        assert!(!report["sir"]["mdct"].contains_key("drums"));
        let table = summary_table(&report);
        assert!(table.contains("bass") && table.contains("GI (mix)"));
    }
}
