use std::io::{self, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stable_constraints::format::{self, infeasible_record, solution_record, summary_record};
use stable_constraints::oracle::{brute_force_stable, DEFAULT_MAX_CANDIDATES};
use stable_constraints::{markets, AssignmentConstraints, Instance, Mode, Options, Solver, WorkerId};

/// Stable matchings of many-to-one markets under forced and forbidden assignments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a market file.
    Validate { file: PathBuf },
    /// Print the reduced market, its extremal matchings and who is always (un)matched.
    NormalForm {
        file: PathBuf,
        /// Also write the reduced digraph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate the stable matchings that satisfy the file's constraints.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// Stop after K solutions.
        #[arg(long, value_name = "K")]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Explore branches on several threads (output order unspecified).
        #[arg(long)]
        parallel: bool,
    },
    /// Brute-force every stable matching and filter by the constraints.
    Oracle {
        file: PathBuf,
        #[arg(long, value_name = "B", default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u128,
    },
    /// Print the 2x2-block market with 2^(n/2) stable matchings.
    GenAppendixD {
        #[arg(long)]
        n: usize,
        /// Forbid worker k at firm k for every k from K on.
        #[arg(long, value_name = "K")]
        forbid_diagonal_from: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    WorkerOpt,
    FirmOpt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

const INPUT_ERROR: u8 = 2;

fn load(path: &Path) -> Result<(Instance, AssignmentConstraints), ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })?;
    format::parse_instance(&text).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) | Err(code) => code,
    }
}

fn run(command: Command) -> Result<ExitCode, ExitCode> {
    match command {
        Command::Validate { file } => {
            let (inst, ac) = load(&file)?;
            println!(
                "ok: {} workers, {} firms, {} positions",
                inst.num_workers(),
                inst.num_firms(),
                inst.num_positions()
            );
            if !ac.contradictions().is_empty() {
                println!("note: constraints are self-contradictory; every query answers no");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::NormalForm { file, dot } => {
            let (inst, _) = load(&file)?;
            normal_form(&inst, dot.as_deref())
        }
        Command::Solve { file, mode, limit, format, parallel } => {
            let (inst, ac) = load(&file)?;
            let mode = match mode {
                ModeArg::All => Mode::All,
                ModeArg::WorkerOpt => Mode::WorkerOptimal,
                ModeArg::FirmOpt => Mode::FirmOptimal,
            };
            solve(&inst, &ac, &Options { mode, limit, parallel }, format)
        }
        Command::Oracle { file, max_candidates } => {
            let (inst, ac) = load(&file)?;
            let all = brute_force_stable(&inst, max_candidates).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(INPUT_ERROR)
            })?;
            let kept = all.filter_by_constraints(&ac);
            for mu in &kept.stable {
                println!("{}", mu.display(&inst));
            }
            eprintln!(
                "{} stable matchings, {} satisfy the constraints ({} candidates examined)",
                all.stable.len(),
                kept.stable.len(),
                all.candidates
            );
            Ok(if kept.stable.is_empty() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::GenAppendixD { n, forbid_diagonal_from } => {
            let inst = markets::block_family(n).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(INPUT_ERROR)
            })?;
            let ac = forbid_diagonal_from
                .map(|k| markets::forbid_diagonal(&inst, k))
                .unwrap_or_default();
            print!("{}", format::serialize_instance(&inst, &ac));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn normal_form(inst: &Instance, dot: Option<&Path>) -> Result<ExitCode, ExitCode> {
    let solver = Solver::new(inst);
    let split = solver.split();
    let nf = solver.normal_form();
    let d = &nf.digraph;
    let rows = split.row_names();
    let cols = split.column_names();
    let name = |v: stable_constraints::Vertex| format!("({},{})", rows[v.row], cols[v.col]);

    println!("positions: {}", cols.join(" "));
    println!("surviving pairs ({}):", d.live_count());
    for r in 0..d.rows() {
        let entries: Vec<&str> = d.row_entries(r).map(|c| cols[c].as_str()).collect();
        if !entries.is_empty() {
            println!("  {}: {}", rows[r], entries.join(" "));
        }
    }
    println!("r = {}", nf.r);
    let (m_w, m_f) = nf.extremal_matchings();
    println!("worker-optimal: {}", m_w.iter().map(name).collect::<Vec<_>>().join(" "));
    println!("firm-optimal:   {}", m_f.iter().map(name).collect::<Vec<_>>().join(" "));

    let rh = nf.rural_hospitals(split);
    let list = |xs: Vec<String>| if xs.is_empty() { "none".to_string() } else { xs.join(" ") };
    println!(
        "never employed: {}",
        list(rh.never_employed.iter().map(|&w| inst.worker_name(w).to_string()).collect())
    );
    println!("never filled: {}", list(rh.never_filled.iter().map(|&c| cols[c].clone()).collect()));
    println!("in every stable matching: {}", list(rh.fixed_pairs.iter().map(|&v| name(v)).collect()));
    for (f, staff) in &rh.underfilled_firms {
        let staff: Vec<String> = staff.iter().map(|&w: &WorkerId| inst.worker_name(w).to_string()).collect();
        println!("under quota: {} always gets {}", inst.firm_name(*f), list(staff));
    }

    if let Some(path) = dot {
        std::fs::write(path, d.to_dot(&rows, &cols)).map_err(|e| {
            eprintln!("{}: {e}", path.display());
            ExitCode::from(INPUT_ERROR)
        })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(inst: &Instance, ac: &AssignmentConstraints, opts: &Options, format: OutputFormat) -> Result<ExitCode, ExitCode> {
    let solver = Solver::new(inst);
    let split = solver.split();
    let stdout = io::stdout();
    let mut index = 0;
    let out = solver.solve_with(ac, opts, |s| {
        index += 1;
        let mut lock = stdout.lock();
        let written = match format {
            OutputFormat::Text => writeln!(lock, "{}", s.assignment.display(inst)),
            OutputFormat::Json => writeln!(lock, "{}", solution_record(split, index, s)),
        };
        // A closed pipe ends the search quietly.
        match written.and_then(|_| lock.flush()) {
            Ok(()) => ControlFlow::Continue(()),
            Err(_) => ControlFlow::Break(()),
        }
    });

    for entry in &out.dropped {
        eprintln!("dropped (cannot occur in any stable matching): {}", entry.describe(inst));
    }
    if let Some(reason) = &out.infeasible {
        let text = reason.describe(inst);
        match format {
            OutputFormat::Text => eprintln!("{text}"),
            OutputFormat::Json => println!("{}", infeasible_record(&text)),
        }
        return Ok(ExitCode::FAILURE);
    }
    match format {
        OutputFormat::Text => eprintln!(
            "{} solution(s){}, {} search node(s)",
            out.solutions.len(),
            if out.truncated { " (limit reached, more exist)" } else { "" },
            out.stats.calls
        ),
        OutputFormat::Json => println!("{}", summary_record(&out.stats, out.truncated, out.r)),
    }
    Ok(if out.solutions.is_empty() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}
