use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use membcover::gmmgsc::{slab_instances, solve_detailed};
use membcover::io::generate::{generate_instance, GeneratorParams, WitnessMode};
use membcover::io::report::{OracleReport, Report, SolveReport};
use membcover::io::{parse_instance, render_svg, serialize_instance};
use membcover::line_solver::solve_line;
use membcover::lp::build_slab_lp;
use membcover::oracle::{exact_min_membership, verify, verify_global_solution, DEFAULT_MAX_M};
use membcover::slab_solver::solve_slab_detailed;
use membcover::{membership, Error, Execution, Instance, InstanceKind, Problem, SolveOptions, Strictness, UnitSquare};

#[derive(Parser)]
#[command(name = "membcover", version, about = "Minimum-membership set cover with unit squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the cover.
    Solve(SolveArgs),
    /// Exact optimum by exhaustive search (small instances only).
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_M)]
        max_m: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a cover given as square ids (comma or space separated).
    Verify {
        file: PathBuf,
        ids: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Global)]
        mode: Mode,
        /// Also compute the exact optimum and the bound slack.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Draw an instance, optionally with a cover, as SVG.
    Plot {
        file: PathBuf,
        #[arg(long)]
        solution: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Global)]
    mode: Mode,
    /// Replace the witnesses by one point per face of the square arrangement.
    #[arg(long)]
    ply: bool,
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    /// Attach a verification report.
    #[arg(long)]
    verify: bool,
    /// Attach the exact optimum (implies --verify).
    #[arg(long)]
    oracle: bool,
    /// Solve slabs and LP components on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Write the LP relaxation rows of every slab to FILE.
    #[arg(long, value_name = "FILE")]
    dump_lp: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Mode::Global)]
    kind: Mode,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Number of uniformly placed witnesses.
    #[arg(long, conflicts_with = "ply")]
    nprime: Option<usize>,
    /// Derive the witnesses from the square arrangement.
    #[arg(long)]
    ply: bool,
    #[arg(long, default_value_t = 3.0)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Global,
    Slab,
    Line,
}

impl From<Mode> for InstanceKind {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Global => InstanceKind::Global,
            Mode::Slab => InstanceKind::Slab,
            Mode::Line => InstanceKind::Line,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Validation { .. } | Error::InvalidInstance(_) | Error::DegenerateInstance(_) => 2,
        Error::InfeasibleInput { .. } => 3,
        Error::TooLarge { .. } => 4,
        _ => 1,
    }
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text, Strictness::from_env())
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(report: &impl Report, format: Format) {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
}

fn parse_ids(args: &[String], inst: &Instance) -> Result<Vec<UnitSquare>, Error> {
    let mut out = Vec::new();
    for tok in args.iter().flat_map(|a| a.split(',')).map(str::trim).filter(|t| !t.is_empty()) {
        let id: usize = tok
            .parse()
            .map_err(|_| Error::InvalidInstance(format!("invalid square id `{tok}`")))?;
        let s = inst
            .square_by_id(id)
            .ok_or_else(|| Error::InvalidInstance(format!("no square with id {id}")))?;
        if !out.contains(s) {
            out.push(*s);
        }
    }
    out.sort_by_key(|s| s.id);
    Ok(out)
}

fn solve(args: SolveArgs) -> Result<(), Error> {
    let inst = read_instance(&args.file)?;
    let mut problem = Problem::from_instance(inst, args.mode.into())?;
    if args.ply {
        problem = problem.with_ply_witnesses();
    }
    let opts = SolveOptions {
        strictness: Strictness::from_env(),
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let inst = problem.instance();
    if let Some(path) = &args.dump_lp {
        let mut dump = String::new();
        let slabs: Vec<(i64, Instance)> = match &problem {
            Problem::Global(g) => slab_instances(g).into_iter().map(|(k, s)| (k, s.base)).collect(),
            Problem::Slab(s) => vec![(s.y_bottom.floor() as i64, s.base.clone())],
            Problem::Line(l) => vec![(l.line_y.floor() as i64, l.base.clone())],
        };
        for (k, base) in slabs {
            dump.push_str(&format!("# slab {k}\n"));
            dump.push_str(&build_slab_lp(&base)?.dump());
        }
        fs::write(path, dump)?;
    }

    let with_report = args.verify || args.oracle;
    let (squares, max_swaps, verification) = match &problem {
        Problem::Global(g) => {
            let sol = solve_detailed(g, &opts)?;
            let v = with_report.then(|| verify_global_solution(g, &sol, args.oracle));
            (sol.squares.clone(), sol.max_swaps_per_line(), v)
        }
        Problem::Slab(s) => {
            let sol = solve_slab_detailed(s, &opts)?;
            let swaps = sol.bottom.trace.len().max(sol.top.trace.len());
            (sol.squares, swaps, None)
        }
        Problem::Line(l) => {
            let sol = solve_line(l, opts.strictness)?;
            (sol.squares, sol.trace.len(), None)
        }
    };
    let verification = verification.or_else(|| with_report.then(|| verify(&problem, &squares, args.oracle)));
    if let Some(path) = &args.svg {
        fs::write(path, render_svg(inst, Some(&squares)))?;
    }
    let report = SolveReport {
        mode: problem.kind(),
        m: inst.squares.len(),
        n: inst.points.len(),
        n_prime: inst.witnesses.len(),
        solution: squares.iter().map(|s| s.id).collect(),
        size: squares.len(),
        membership: membership(&inst.witnesses, &squares),
        max_swaps,
        verification,
    };
    emit(&report, args.format);
    Ok(())
}

fn gen(args: GenArgs) -> Result<(), Error> {
    let params = GeneratorParams {
        m: args.m,
        n: args.n,
        witnesses: if args.ply { WitnessMode::Ply } else { WitnessMode::Count(args.nprime.unwrap_or(args.n)) },
        spread: args.spread,
        seed: args.seed,
        kind: args.kind.into(),
    };
    let inst = generate_instance(&params)?;
    write_or_print(args.output.as_deref(), &serialize_instance(&inst))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Solve(args) => solve(args)?,
        Command::Oracle { file, max_m, format } => {
            let inst = read_instance(&file)?;
            let exact = exact_min_membership(&inst, max_m)?;
            let report = OracleReport { opt: exact.opt, solution: exact.witness.iter().map(|s| s.id).collect() };
            emit(&report, format);
        }
        Command::Verify { file, ids, mode, oracle, format } => {
            let inst = read_instance(&file)?;
            let sol = parse_ids(&ids, &inst)?;
            let problem = Problem::from_instance(inst, mode.into())?;
            let report = verify(&problem, &sol, oracle);
            emit(&report, format);
            if !report.feasible {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Gen(args) => gen(args)?,
        Command::Plot { file, solution, output } => {
            let inst = read_instance(&file)?;
            let sol = solution.map(|s| parse_ids(&[s], &inst)).transpose()?;
            write_or_print(output.as_deref(), &render_svg(&inst, sol.as_deref()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
