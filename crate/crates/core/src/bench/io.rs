//! Facts files, edge lists and configuration files.
//!
//! Config file grammar, one directive per line, `#` comments:
//!
//! ```text
//! strategy S1
//! option delta_outermost
//! rep   <relation> key=<a_b_..> access=<CI|UKI|UPI> ds=<SA|SAPP|BP|HT|RX>
//! rep   <relation> access=FS ds=RS
//! delta <relation> key=<a_b_..> access=.. ds=..
//! map   <rule>.<atom> -> <relation>/<key>
//! map   <rule>.<atom> -> <relation>@delta/<key>
//! map   <rule>.<atom> -> <relation>/-
//! ```
//!
//! `delta` lines configure the delta and new relations of a recursive IDB;
//! `@delta` targets the delta occurrence of a rule variant and `/-` selects
//! the full-scan representation.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::BenchError;
use crate::eval::{EvalConfig, Facts, OccurrenceRef, Side};
use crate::frontend::Program;
use crate::storage::{IndexKey, RepConfig};

fn parse_err(line: usize, msg: impl Into<String>) -> BenchError {
    BenchError::Parse { line, msg: msg.into() }
}

fn io_err(path: &Path, e: std::io::Error) -> BenchError {
    BenchError::Io { path: path.display().to_string(), msg: e.to_string() }
}

/// Parses tab-separated decimal tuples. Blank lines are skipped. Every row
/// must have `arity` fields when given, otherwise the first row fixes it.
pub fn parse_facts(text: &str, arity: Option<usize>) -> Result<(usize, Vec<u64>), BenchError> {
    let mut width = arity;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let start = out.len();
        for field in line.split('\t') {
            let v: u64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("not an unsigned 64-bit integer: {field:?}")))?;
            out.push(v);
        }
        let n = out.len() - start;
        match width {
            Some(w) if w != n => return Err(parse_err(i + 1, format!("expected {w} fields, found {n}"))),
            None => width = Some(n),
            _ => {}
        }
    }
    Ok((width.unwrap_or(0), out))
}

pub fn render_facts(arity: usize, data: &[u64]) -> String {
    let mut s = String::with_capacity(data.len() * 8);
    if arity == 0 {
        return s;
    }
    for row in data.chunks_exact(arity) {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&fields.join("\t"));
        s.push('\n');
    }
    s
}

/// Reads `<name>.facts` for every relation of `p` that has a file in `dir`.
/// Missing EDB files surface later as missing facts.
pub fn read_facts_dir(dir: &Path, p: &Program) -> Result<Facts, BenchError> {
    let mut f = Facts::new();
    for (name, decl) in &p.decls {
        let path = dir.join(format!("{name}.facts"));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let (_, data) = parse_facts(&text, Some(decl.arity)).map_err(|e| match e {
            BenchError::Parse { line, msg } => parse_err(line, format!("{}: {msg}", path.display())),
            other => other,
        })?;
        f.insert(name.clone(), decl.arity, data);
    }
    Ok(f)
}

pub fn write_facts_dir(dir: &Path, facts: &Facts) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, t) in facts.iter() {
        let path = dir.join(format!("{name}.facts"));
        fs::write(&path, render_facts(t.arity, &t.data)).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

/// Reads whitespace-separated integer pairs line by line; `#` starts a
/// comment.
pub fn parse_edge_list<R: BufRead>(r: R) -> Result<Vec<u64>, BenchError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
        let body = line.split('#').next().unwrap_or("");
        let mut it = body.split_whitespace();
        let (a, b) = match (it.next(), it.next()) {
            (None, _) => continue,
            (Some(a), Some(b)) => (a, b),
            (Some(_), None) => return Err(parse_err(i + 1, "expected two node ids")),
        };
        if it.next().is_some() {
            return Err(parse_err(i + 1, "expected two node ids"));
        }
        for v in [a, b] {
            out.push(v.parse().map_err(|_| parse_err(i + 1, format!("not a node id: {v:?}")))?);
        }
    }
    Ok(out)
}

pub fn load_edge_list(path: &Path) -> Result<Vec<u64>, BenchError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    parse_edge_list(BufReader::new(file))
}

fn render_rep(kind: &str, name: &str, r: &RepConfig) -> String {
    match &r.key {
        Some(k) => format!("{kind} {name} key={k} access={} ds={}", r.access, r.ds),
        None => format!("{kind} {name} access={} ds={}", r.access, r.ds),
    }
}

/// Renders `cfg` in the config file format. `p` supplies relation names
/// for the occurrence mappings.
pub fn render_config(cfg: &EvalConfig, p: &Program) -> String {
    let mut s = format!("strategy {}\n", cfg.strategy);
    if cfg.delta_outermost {
        s.push_str("option delta_outermost\n");
    }
    for (name, reps) in &cfg.relations {
        for r in reps {
            s.push_str(&render_rep("rep", name, r));
            s.push('\n');
        }
    }
    for (name, reps) in &cfg.deltas {
        for r in reps {
            s.push_str(&render_rep("delta", name, r));
            s.push('\n');
        }
    }
    for (o, key) in &cfg.occurrences {
        let rel = p
            .rules
            .get(o.rule)
            .and_then(|r| r.body.get(o.atom))
            .map(|a| a.relation.as_str())
            .unwrap_or("?");
        let side = if o.side == Side::Delta { "@delta" } else { "" };
        let key = key.as_ref().map(|k| k.to_string()).unwrap_or_else(|| "-".into());
        s.push_str(&format!("map {}.{} -> {rel}{side}/{key}\n", o.rule, o.atom));
    }
    s
}

fn parse_rep(fields: &[&str], line: usize) -> Result<RepConfig, BenchError> {
    let (mut key, mut access, mut ds) = (None, None, None);
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, found {f:?}")))?;
        let bad = |e: crate::storage::StorageError| parse_err(line, e.to_string());
        match k {
            "key" => key = Some(v.parse::<IndexKey>().map_err(bad)?),
            "access" => access = Some(v.parse().map_err(bad)?),
            "ds" => ds = Some(v.parse().map_err(bad)?),
            _ => return Err(parse_err(line, format!("unknown field {k:?}"))),
        }
    }
    let access = access.ok_or_else(|| parse_err(line, "missing access="))?;
    let ds = ds.ok_or_else(|| parse_err(line, "missing ds="))?;
    Ok(RepConfig::new(access, ds, key))
}

/// Parses the config file format. Relation names are not checked against
/// a program here; `EvalConfig::validate` does that.
pub fn parse_config(text: &str) -> Result<EvalConfig, BenchError> {
    let mut cfg = EvalConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "strategy" => {
                let s = fields.get(1).ok_or_else(|| parse_err(line, "missing strategy"))?;
                cfg.strategy = s.parse().map_err(|e: crate::eval::EvalError| parse_err(line, e.to_string()))?;
            }
            "option" => match fields.get(1).copied() {
                Some("delta_outermost") => cfg.delta_outermost = true,
                other => return Err(parse_err(line, format!("unknown option {other:?}"))),
            },
            "rep" | "delta" => {
                let name = fields.get(1).ok_or_else(|| parse_err(line, "missing relation"))?;
                let rep = parse_rep(&fields[2..], line)?;
                let map = if fields[0] == "rep" { &mut cfg.relations } else { &mut cfg.deltas };
                map.entry(name.to_string()).or_default().push(rep);
            }
            "map" => {
                if fields.len() != 4 || fields[2] != "->" {
                    return Err(parse_err(line, "expected map <rule>.<atom> -> <relation>/<key>"));
                }
                let (r, a) = fields[1].split_once('.').ok_or_else(|| parse_err(line, "expected <rule>.<atom>"))?;
                let rule = r.parse().map_err(|_| parse_err(line, format!("bad rule index {r:?}")))?;
                let atom = a.parse().map_err(|_| parse_err(line, format!("bad atom index {a:?}")))?;
                let (target, key) =
                    fields[3].rsplit_once('/').ok_or_else(|| parse_err(line, "expected <relation>/<key>"))?;
                let side = if target.ends_with("@delta") { Side::Delta } else { Side::Base };
                let key = if key == "-" {
                    None
                } else {
                    Some(key.parse::<IndexKey>().map_err(|e| parse_err(line, e.to_string()))?)
                };
                cfg.occurrences.insert(OccurrenceRef { rule, atom, side }, key);
            }
            other => return Err(parse_err(line, format!("unknown directive {other:?}"))),
        }
    }
    Ok(cfg)
}
