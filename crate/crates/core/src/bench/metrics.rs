//! One CSV row per benchmark cell.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::eval::RepCounters;

/// Column order of the metrics CSV. Timings are seconds averaged over the
/// repetitions; counters are totals over all representations of one run.
pub const CSV_HEADER: [&str; 22] = [
    "experiment",
    "params",
    "config",
    "repetitions",
    "create_s",
    "bulk_load_s",
    "body_eval_s",
    "merge_s",
    "total_s",
    "bulk_load",
    "iter_calls",
    "iter_returned",
    "probe_calls",
    "probe_returned",
    "contains",
    "append",
    "remove",
    "footprint_bytes",
    "store_bytes",
    "result_tuples",
    "iterations",
    "error",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub experiment: String,
    /// Cell parameters as `name=value` pairs joined by `;`.
    pub params: String,
    pub config: String,
    pub repetitions: usize,
    pub create_s: f64,
    pub bulk_load_s: f64,
    pub body_eval_s: f64,
    pub merge_s: f64,
    pub total_s: f64,
    pub counters: RepCounters,
    pub footprint_bytes: u64,
    pub store_bytes: u64,
    pub result_tuples: u64,
    pub iterations: u64,
    /// Empty unless the cell failed.
    pub error: String,
}

impl MetricsRow {
    pub fn failed(experiment: &str, params: &str, config: &str, error: String) -> Self {
        MetricsRow {
            experiment: experiment.into(),
            params: params.into(),
            config: config.into(),
            error,
            ..Default::default()
        }
    }

    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }

    /// Looks up a `name=value` parameter.
    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.split(';').find_map(|kv| kv.split_once('=').filter(|(k, _)| *k == name).map(|(_, v)| v))
    }

    /// Rounds every timing to the precision the CSV keeps.
    pub fn rounded(mut self) -> Self {
        for t in [&mut self.create_s, &mut self.bulk_load_s, &mut self.body_eval_s, &mut self.merge_s, &mut self.total_s] {
            *t = round_sig(*t);
        }
        self
    }

    fn record(&self) -> Vec<String> {
        let c = &self.counters;
        vec![
            self.experiment.clone(),
            self.params.clone(),
            self.config.clone(),
            self.repetitions.to_string(),
            fmt_sig(self.create_s),
            fmt_sig(self.bulk_load_s),
            fmt_sig(self.body_eval_s),
            fmt_sig(self.merge_s),
            fmt_sig(self.total_s),
            c.bulk_load.to_string(),
            c.iter_calls.to_string(),
            c.iter_returned.to_string(),
            c.probe_calls.to_string(),
            c.probe_returned.to_string(),
            c.contains.to_string(),
            c.append.to_string(),
            c.remove.to_string(),
            self.footprint_bytes.to_string(),
            self.store_bytes.to_string(),
            self.result_tuples.to_string(),
            self.iterations.to_string(),
            self.error.clone(),
        ]
    }

    fn from_record(r: &csv::StringRecord, line: usize) -> Result<Self, BenchError> {
        if r.len() != CSV_HEADER.len() {
            return Err(BenchError::Parse { line, msg: format!("expected {} columns, found {}", CSV_HEADER.len(), r.len()) });
        }
        let int = |i: usize| -> Result<u64, BenchError> {
            r[i].parse().map_err(|_| BenchError::Parse { line, msg: format!("{}: not an integer: {:?}", CSV_HEADER[i], &r[i]) })
        };
        let float = |i: usize| -> Result<f64, BenchError> {
            r[i].parse().map_err(|_| BenchError::Parse { line, msg: format!("{}: not a number: {:?}", CSV_HEADER[i], &r[i]) })
        };
        Ok(MetricsRow {
            experiment: r[0].to_string(),
            params: r[1].to_string(),
            config: r[2].to_string(),
            repetitions: int(3)? as usize,
            create_s: float(4)?,
            bulk_load_s: float(5)?,
            body_eval_s: float(6)?,
            merge_s: float(7)?,
            total_s: float(8)?,
            counters: RepCounters {
                bulk_load: int(9)?,
                iter_calls: int(10)?,
                iter_returned: int(11)?,
                probe_calls: int(12)?,
                probe_returned: int(13)?,
                contains: int(14)?,
                append: int(15)?,
                remove: int(16)?,
            },
            footprint_bytes: int(17)?,
            store_bytes: int(18)?,
            result_tuples: int(19)?,
            iterations: int(20)?,
            error: r[21].to_string(),
        })
    }
}

/// Six significant digits, positional notation for ordinary magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new digit (9.999995 -> 10.00000).
        let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
        if digits > 6 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.5e}")
    }
}

pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

pub fn write_csv<W: Write>(rows: &[MetricsRow], w: W) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| BenchError::Io { path: "<csv>".into(), msg: e.to_string() };
    out.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        out.write_record(r.record()).map_err(err)?;
    }
    out.flush().map_err(|e| BenchError::Io { path: "<csv>".into(), msg: e.to_string() })
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<MetricsRow>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(|e| BenchError::Parse { line: 1, msg: e.to_string() })?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(BenchError::Parse { line: 1, msg: "unexpected header".into() });
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| BenchError::Parse { line: i + 2, msg: e.to_string() })?;
        out.push(MetricsRow::from_record(&rec, i + 2)?);
    }
    Ok(out)
}

pub fn emit_csv(rows: &[MetricsRow], path: &std::path::Path) -> Result<(), BenchError> {
    let f = std::fs::File::create(path).map_err(|e| BenchError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    write_csv(rows, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1.00000");
        assert_eq!(fmt_sig(0.00123456789), "0.00123457");
        assert_eq!(fmt_sig(123456.7), "123457");
        assert_eq!(fmt_sig(9.999996), "10.0000");
        assert_eq!(fmt_sig(1.5e-9), "1.50000e-9");
    }

    #[test]
    fn csv_roundtrip() {
        let mut a = MetricsRow { experiment: "scaling".into(), params: "s=1;order=ordered".into(), config: "CI-SA(0)".into(), repetitions: 3, body_eval_s: 0.0123456789, ..Default::default() };
        a.counters.probe_calls = 42;
        let a = a.rounded();
        let b = MetricsRow::failed("scaling", "s=2", "CI-HT(0)", "hash index, cannot serve, \"prefix\"".into());
        let mut buf = Vec::new();
        write_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![a.clone(), b]);
        assert_eq!(a.param("order"), Some("ordered"));
    }
}
