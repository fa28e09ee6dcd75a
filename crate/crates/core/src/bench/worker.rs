//! On-disk form of a benchmark cell, so each cell can run in a process of
//! its own.
//!
//! A cell directory holds `cell.json` plus either `program.dl`,
//! `config.cfg` and `facts/` (program cells) or `base.facts` and
//! `found.facts` (build-up cells).

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::experiment::{Cell, CellWork, BUILDUP_ARITY};
use super::io::{parse_config, parse_facts, read_facts_dir, render_config, render_facts, write_facts_dir};
use super::BenchError;
use crate::eval::Strategy;
use crate::frontend::parse_program;
use crate::storage::RepConfig;

#[derive(Serialize, Deserialize)]
struct Header {
    params: String,
    config: String,
    /// Present for build-up cells only.
    buildup: Option<(RepConfig, Strategy)>,
}

fn io_err(path: &Path, e: std::io::Error) -> BenchError {
    BenchError::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn save_cell(cell: &Cell, dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let buildup = match &cell.work {
        CellWork::Program { program, facts, config } => {
            write(&dir.join("program.dl"), &program.to_string())?;
            write(&dir.join("config.cfg"), &render_config(config, program))?;
            write_facts_dir(&dir.join("facts"), facts)?;
            None
        }
        CellWork::Buildup { base, found, rep, strategy } => {
            write(&dir.join("base.facts"), &render_facts(BUILDUP_ARITY, base))?;
            write(&dir.join("found.facts"), &render_facts(BUILDUP_ARITY, found))?;
            Some((rep.clone(), *strategy))
        }
    };
    let h = Header { params: cell.params.clone(), config: cell.config.clone(), buildup };
    let json = serde_json::to_string_pretty(&h).map_err(|e| BenchError::Usage(e.to_string()))?;
    write(&dir.join("cell.json"), &json)
}

pub fn load_cell(dir: &Path) -> Result<Cell, BenchError> {
    let h: Header =
        serde_json::from_str(&read(&dir.join("cell.json"))?).map_err(|e| BenchError::Usage(format!("cell.json: {e}")))?;
    let work = match h.buildup {
        None => {
            let program = parse_program(&read(&dir.join("program.dl"))?)
                .map_err(|e| BenchError::Usage(format!("program.dl: {e}")))?;
            let config = parse_config(&read(&dir.join("config.cfg"))?)?;
            let facts = read_facts_dir(&dir.join("facts"), &program)?;
            CellWork::Program { program: Arc::new(program), facts: Arc::new(facts), config: Arc::new(config) }
        }
        Some((rep, strategy)) => {
            let (_, base) = parse_facts(&read(&dir.join("base.facts"))?, Some(BUILDUP_ARITY))?;
            let (_, found) = parse_facts(&read(&dir.join("found.facts"))?, Some(BUILDUP_ARITY))?;
            CellWork::Buildup { base: Arc::new(base), found: Arc::new(found), rep, strategy }
        }
    };
    Ok(Cell { params: h.params, config: h.config, work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{run_cell, Experiment, ExperimentSpec};

    #[test]
    fn saved_cells_run_identically() {
        let mut cells = Vec::new();
        for (e, scale) in [(Experiment::Workloads, 0.0005), (Experiment::Buildup, 0.001), (Experiment::Sharing, 0.001)] {
            let mut spec = ExperimentSpec::new(e);
            spec.scale = scale;
            let all = spec.cells().unwrap();
            let step = all.len() / 5 + 1;
            cells.extend(all.into_iter().step_by(step).map(|c| (e, c)));
        }
        let tmp = tempfile::tempdir().unwrap();
        for (i, (e, cell)) in cells.iter().enumerate() {
            let dir = tmp.path().join(i.to_string());
            save_cell(cell, &dir).unwrap();
            let back = load_cell(&dir).unwrap();
            assert_eq!((&back.params, &back.config), (&cell.params, &cell.config));
            let (a, b) = (run_cell(e.name(), cell, 1).unwrap(), run_cell(e.name(), &back, 1).unwrap());
            assert_eq!((a.counters, a.result_tuples, a.footprint_bytes, a.error), (b.counters, b.result_tuples, b.footprint_bytes, b.error), "{} {}", cell.params, cell.config);
        }
    }
}
