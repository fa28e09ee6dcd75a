use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use reprlog::bench::{
    emit_csv, gen_andersen, gen_buildup_stream, gen_dense_shuffled, gen_interweaving, gen_probe_pair, gen_random_graph,
    gen_schema_pair, gen_wide_pair, load_edge_list, parse_config, read_facts_dir, render_config, render_facts,
    load_cell, run_benchmark_with, run_cell, run_trends_with, save_cell, write_facts_dir, BenchError, Cell, CellRunner,
    Experiment, ExperimentSpec, GraphSize, MetricsRow, TrendOptions, Workload,
};
use reprlog::eval::{run_program, EvalConfig, Facts, Strategy};
use reprlog::frontend::{parse_program, Program};
use reprlog::profiler::{compute_signature, WorkloadSignature};
use reprlog::selector::{select_configuration, SelectOptions};

#[derive(Parser)]
#[command(name = "reprlog", version, about = "Datalog evaluation with configurable relation representations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a program and report cardinalities, timings and counters.
    Run {
        program: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        /// Config file; the uniform CI-BP baseline when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<Strategy>,
        /// Write every IDB relation as `<name>.facts` into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Print the full counter breakdown as JSON.
        #[arg(long)]
        counters: bool,
    },
    /// Profile a program under the baseline and write its signature.
    Profile {
        program: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose a configuration from a stored signature.
    Select {
        #[arg(long)]
        signature: PathBuf,
        #[arg(long)]
        space_budget: Option<u64>,
        /// Print the chosen representations and the decision trace.
        #[arg(long)]
        explain: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment grid, or `trends` for the performance ordering checks.
    Bench {
        experiment: String,
        /// Fraction of the published sizes (default 0.01).
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        /// Size in MiB of the probed and loaded relations for `trends`.
        #[arg(long, default_value_t = 100.0)]
        s_mib: f64,
        #[arg(long)]
        csv: PathBuf,
        /// Run every cell in this process instead of one worker process per
        /// cell.
        #[arg(long)]
        in_process: bool,
    },
    /// Run one saved benchmark cell and print its metrics row as JSON.
    #[command(hide = true)]
    BenchCell {
        dir: PathBuf,
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        repetitions: usize,
    },
    /// Write generated facts files.
    Gen {
        #[command(subcommand)]
        generator: Generator,
        #[arg(long, global = true, default_value_t = 42)]
        seed: u64,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// Dense shuffled keys into `r.facts`.
    Dense {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
    },
    /// Outer `r` and inner `s` with a fixed partner count per outer tuple.
    ProbePair {
        #[arg(long)]
        r_bytes: usize,
        #[arg(long)]
        s_bytes: usize,
        #[arg(long, default_value_t = 2)]
        partners: usize,
    },
    /// Wide `r` and `s` joining on a compound key.
    WidePair {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        schema: usize,
        #[arg(long)]
        key_width: usize,
    },
    /// Binary `r` and `s` of the given schema width.
    SchemaPair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        schema: usize,
    },
    /// Inputs of the four-rule interweaving program.
    Interweaving {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
    },
    /// `base.facts` and `found.facts` for the build-up strategies.
    Buildup {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        found: usize,
        #[arg(long, default_value_t = 1.0)]
        new_fraction: f64,
        #[arg(long, default_value_t = 1)]
        dup: usize,
        #[arg(long)]
        ordered: bool,
    },
    /// Random directed graph into `<relation>.facts`.
    Graph {
        #[arg(long)]
        n: usize,
        /// Edge probability.
        #[arg(long, conflicts_with = "m")]
        p: Option<f64>,
        /// Exact edge count.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "edge")]
        relation: String,
    },
    /// Convert a whitespace-separated edge list into `<relation>.facts`.
    EdgeList {
        path: PathBuf,
        #[arg(long, default_value = "edge")]
        relation: String,
    },
    /// Synthetic points-to inputs.
    Andersen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        statements: usize,
    },
    /// A bundled workload: generated at `--scale` or the checked-in dataset.
    Workload {
        name: Workload,
        #[arg(long)]
        scale: Option<f64>,
        /// Also write the program next to the facts.
        #[arg(long)]
        program: bool,
    },
}

fn load_program(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_program(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_facts(dir: &Path, p: &Program) -> Result<Facts> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    Ok(read_facts_dir(dir, p)?)
}

fn cmd_run(program: &Path, facts: &Path, config: Option<&Path>, strategy: Option<Strategy>, dump: Option<&Path>, counters: bool) -> Result<()> {
    let p = load_program(program)?;
    let f = load_facts(facts, &p)?;
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => EvalConfig::baseline(&p),
    };
    if let Some(s) = strategy {
        cfg.strategy = s;
    }
    let out = run_program(&p, &f, &cfg)?;
    for name in p.idbs() {
        println!("{name}\t{}", out.results.cardinality(name));
    }
    let t = &out.timings;
    println!(
        "time\tcreate={:.6}s bulk_load={:.6}s body_eval={:.6}s merge={:.6}s total={:.6}s",
        t.create.as_secs_f64(),
        t.bulk_load.as_secs_f64(),
        t.body_eval.as_secs_f64(),
        t.merge.as_secs_f64(),
        t.total().as_secs_f64()
    );
    println!("iterations\t{}", out.counters.total_iterations());
    println!("footprint\t{} bytes", out.total_footprint());
    if counters {
        println!("{}", serde_json::to_string_pretty(&out.counters.rep_rows())?);
        println!("{}", serde_json::to_string_pretty(&out.counters.edge_rows())?);
    }
    if let Some(dir) = dump {
        let mut idb = Facts::new();
        for name in p.idbs() {
            let rows = out.results.get(name).unwrap_or(&[]);
            let arity = p.arity(name).unwrap_or(1);
            idb.insert(name, arity, rows.iter().flatten().copied().collect());
        }
        write_facts_dir(dir, &idb)?;
    }
    Ok(())
}

fn cmd_profile(program: &Path, facts: &Path, out: &Path) -> Result<()> {
    let p = load_program(program)?;
    let f = load_facts(facts, &p)?;
    let sig = compute_signature(&p, &f)?;
    fs::write(out, sig.to_json()).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn cmd_select(signature: &Path, space_budget: Option<u64>, explain: bool, out: &Path) -> Result<()> {
    let text = fs::read_to_string(signature).with_context(|| format!("reading {}", signature.display()))?;
    let sig = WorkloadSignature::from_json(&text)?;
    let opts = SelectOptions { space_budget, ..Default::default() };
    let sel = select_configuration(&sig, &opts)?;
    if explain {
        print!("{}", sel.explain());
    }
    fs::write(out, render_config(&sel.to_eval_config(), &sig.program)).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

/// Saves the cell, runs it through a child `bench-cell` process and reads
/// back the row.
fn run_in_worker(experiment: &str, cell: &Cell, repetitions: usize) -> Result<MetricsRow, BenchError> {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let err = |m: String| BenchError::Usage(m);
    let dir = std::env::temp_dir().join(format!("reprlog-cell-{}-{}", std::process::id(), NEXT.fetch_add(1, Ordering::Relaxed)));
    save_cell(cell, &dir)?;
    let exe = std::env::current_exe().map_err(|e| err(e.to_string()))?;
    let out = Command::new(exe)
        .arg("bench-cell")
        .arg(&dir)
        .args(["--experiment", experiment, "--repetitions", &repetitions.to_string()])
        .output();
    let _ = fs::remove_dir_all(&dir);
    let out = out.map_err(|e| err(format!("starting worker: {e}")))?;
    if !out.status.success() {
        return Err(err(format!("worker for {} {}: {}", cell.params, cell.config, String::from_utf8_lossy(&out.stderr).trim())));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| err(format!("worker output: {e}")))
}

fn cmd_bench_cell(dir: &Path, experiment: &str, repetitions: usize) -> Result<()> {
    let cell = load_cell(dir)?;
    let row = run_cell(experiment, &cell, repetitions)?;
    println!("{}", serde_json::to_string(&row)?);
    Ok(())
}

fn cmd_bench(experiment: &str, scale: Option<f64>, seed: u64, repetitions: usize, s_mib: f64, csv: &Path, in_process: bool) -> Result<bool> {
    let runner: &mut CellRunner = if in_process { &mut run_cell } else { &mut run_in_worker };
    if experiment == "trends" {
        let opts = TrendOptions {
            s_mib,
            workload_scale: scale.map(|s| s / 0.01).unwrap_or(1.0),
            seed,
            repetitions,
            ..Default::default()
        };
        let report = run_trends_with(&opts, runner)?;
        for c in &report.checks {
            println!("{}\t{}\tratio={:.3}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.ratio, c.detail);
        }
        emit_csv(&report.rows, csv)?;
        return Ok(report.passed());
    }
    let mut spec = ExperimentSpec::new(experiment.parse::<Experiment>()?);
    if let Some(s) = scale {
        spec.scale = s;
    }
    spec.seed = seed;
    spec.repetitions = repetitions;
    let rows = run_benchmark_with(&spec, runner)?;
    let failed = rows.iter().filter(|r| r.is_error()).count();
    emit_csv(&rows, csv)?;
    eprintln!("{} rows, {failed} failed cells", rows.len());
    Ok(true)
}

fn write_one(dir: &Path, name: &str, arity: usize, data: &[u64]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{name}.facts"));
    fs::write(&path, render_facts(arity, data)).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gen(g: Generator, seed: u64, out: Option<PathBuf>) -> Result<()> {
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    match g {
        Generator::Dense { n, arity, multiplicity } => {
            if arity == 0 || multiplicity == 0 {
                bail!("arity and multiplicity must be positive");
            }
            write_one(&dir, "r", arity, &gen_dense_shuffled(n, arity, multiplicity, seed))
        }
        Generator::ProbePair { r_bytes, s_bytes, partners } => {
            let (r, s) = gen_probe_pair(r_bytes, s_bytes, partners, seed);
            write_one(&dir, "r", 2, &r)?;
            write_one(&dir, "s", 2, &s)
        }
        Generator::WidePair { n, schema, key_width } => {
            if key_width == 0 || key_width >= schema {
                bail!("key width must be in 1..schema");
            }
            let (r, s) = gen_wide_pair(n, schema, key_width, seed);
            write_one(&dir, "r", schema, &r)?;
            write_one(&dir, "s", schema, &s)
        }
        Generator::SchemaPair { n, schema } => {
            if schema < 2 {
                bail!("schema width must be at least 2");
            }
            let (r, s) = gen_schema_pair(n, schema, seed);
            write_one(&dir, "r", 2, &r)?;
            write_one(&dir, "s", schema, &s)
        }
        Generator::Interweaving { n, multiplicity } => {
            if multiplicity == 0 {
                bail!("multiplicity must be positive");
            }
            Ok(write_facts_dir(&dir, &gen_interweaving(n, multiplicity, seed))?)
        }
        Generator::Buildup { base, found, new_fraction, dup, ordered } => {
            if !(0.0..=1.0).contains(&new_fraction) || dup == 0 {
                bail!("new fraction must be in [0,1] and dup positive");
            }
            let (b, f) = gen_buildup_stream(base, found, new_fraction, dup, ordered, seed);
            write_one(&dir, "base", 2, &b)?;
            write_one(&dir, "found", 2, &f)
        }
        Generator::Graph { n, p, m, relation } => {
            let size = match (p, m) {
                (Some(p), None) if (0.0..=1.0).contains(&p) => GraphSize::P(p),
                (None, Some(m)) => GraphSize::M(m),
                _ => bail!("give exactly one of --p in [0,1] or --m"),
            };
            write_one(&dir, &relation, 2, &gen_random_graph(n, size, seed))
        }
        Generator::EdgeList { path, relation } => write_one(&dir, &relation, 2, &load_edge_list(&path)?),
        Generator::Andersen { vars, statements } => Ok(write_facts_dir(&dir, &gen_andersen(vars, statements, seed))?),
        Generator::Workload { name, scale, program } => {
            let facts = match scale {
                Some(s) => name.generate(s, seed),
                None => name.bundled_facts(),
            };
            write_facts_dir(&dir, &facts)?;
            if program {
                fs::write(dir.join(format!("{name}.dl")), name.source())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { program, facts, config, strategy, dump, counters } => {
            cmd_run(&program, &facts, config.as_deref(), strategy, dump.as_deref(), counters).map(|_| true)
        }
        Cmd::Profile { program, facts, out } => cmd_profile(&program, &facts, &out).map(|_| true),
        Cmd::Select { signature, space_budget, explain, out } => {
            cmd_select(&signature, space_budget, explain, &out).map(|_| true)
        }
        Cmd::Bench { experiment, scale, seed, repetitions, s_mib, csv, in_process } => {
            cmd_bench(&experiment, scale, seed, repetitions, s_mib, &csv, in_process)
        }
        Cmd::BenchCell { dir, experiment, repetitions } => cmd_bench_cell(&dir, &experiment, repetitions).map(|_| true),
        Cmd::Gen { generator, seed, out } => cmd_gen(generator, seed, out).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
