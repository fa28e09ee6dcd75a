//! Data generators, the bundled corpus, experiment grids and metrics.

mod corpus;
mod experiment;
mod gen;
mod io;
mod metrics;
mod trends;
mod worker;

use thiserror::Error;

pub use corpus::Workload;
pub use experiment::{
    best_by, interweaving_config, run_benchmark, run_benchmark_with, run_cell, Cell, CellRunner, CellWork, Experiment,
    ExperimentSpec,
};
pub use gen::{
    gen_andersen, gen_buildup_stream, gen_dense_shuffled, gen_interweaving, gen_probe_pair, gen_random_graph,
    gen_schema_pair, gen_wide_pair, GraphSize,
};
pub use io::{
    load_edge_list, parse_config, parse_edge_list, parse_facts, read_facts_dir, render_config, render_facts,
    write_facts_dir,
};
pub use metrics::{emit_csv, fmt_sig, read_csv, round_sig, write_csv, MetricsRow, CSV_HEADER};
pub use trends::{run_trends, run_trends_with, TrendCheck, TrendOptions, TrendReport};
pub use worker::{load_cell, save_cell};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("cell {cell}: counters differ between repetitions")]
    Nondeterministic { cell: String },
}
