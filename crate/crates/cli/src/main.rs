//! `gapsat`: exact model counting from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 branch-node budget exhausted,
//! 3 oracle cross-check mismatch. Results go to stdout, diagnostics to
//! stderr, and identical invocations produce byte-identical stdout.

use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use gapsat_core::bounds::{self, instance_stats, InstanceStats};
use gapsat_core::circuit::{
    amplitude_with, parse_circuit, statevector_amplitude_with, AmplitudeOptions, Boundary,
    STATEVECTOR_QUBIT_CAP,
};
use gapsat_core::dimacs::{parse_dimacs_auto, serialize_dimacs, AnyFormula};
use gapsat_core::oracle::{
    brute_force_count_capped, OracleError, DEFAULT_ENUMERATION_CAP,
};
use gapsat_core::reduce::{reduce_to_signed_2sat, ClauseOrigin};
use gapsat_core::ring::Ring;
use gapsat_core::solver::{
    cdp, cdp_3to2, cdp_to2, cdp_weighted, BranchStrategy, CountResult, SearchStats, SolveError,
    SolveOptions,
};
use gapsat_core::{Int, WeightedFormula};

#[derive(Parser)]
#[command(
    name = "gapsat",
    version,
    about = "Exact model counting: plain, signed and complex-weighted",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count models of an extended DIMACS instance.
    Count(CountArgs),
    /// Exhaustively enumerate the count (ground truth, capped).
    Oracle(OracleArgs),
    /// Reduce a plain instance to signed width-2 form.
    Reduce(InputArg),
    /// Print instance statistics and the runtime-bound report.
    Stats(InputArg),
    /// Compute a circuit amplitude by weighted counting.
    Amplitude(AmplitudeArgs),
}

#[derive(Args)]
struct InputArg {
    /// Input file, or `-` for stdin.
    input: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Plain counting on the instance as given.
    Cdp,
    /// Reduce to signed width-2 form, then count.
    Cdp2,
    /// Dense 3-CNF branching, then the reduction.
    Cdp3to2,
    /// Weighted counting honoring weights and labels.
    Weighted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Most occurrences among shortest residual clauses.
    MaxOccShort,
    /// Most occurrences in the residual formula.
    MaxOcc,
    /// Most occurrences in residual width-3 clauses.
    #[value(name = "max-3deg")]
    Max3deg,
    /// Lowest-indexed variable in the residual formula.
    First,
}

impl From<StrategyArg> for BranchStrategy {
    fn from(s: StrategyArg) -> BranchStrategy {
        match s {
            StrategyArg::MaxOccShort => BranchStrategy::MaxDegreeShortestClause,
            StrategyArg::MaxOcc => BranchStrategy::MaxOccurrence,
            StrategyArg::Max3deg => BranchStrategy::Max3Degree,
            StrategyArg::First => BranchStrategy::FirstUnassigned,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    KeyValue,
}

#[derive(Args)]
struct CountArgs {
    /// Input file, or `-` for stdin.
    input: String,
    #[arg(long, value_enum, default_value = "cdp")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "max-occ-short")]
    strategy: StrategyArg,
    /// Disable component splitting.
    #[arg(long)]
    no_components: bool,
    /// Enable degree-one absorption.
    #[arg(long)]
    absorb: bool,
    /// Abort (exit 2) beyond this many branch nodes.
    #[arg(long)]
    node_cap: Option<u64>,
    /// Print search statistics after the count.
    #[arg(long)]
    stats: bool,
    /// Cross-check against the enumeration oracle; exit 3 on mismatch.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    /// Input file, or `-` for stdin.
    input: String,
    /// Enumeration cap (refuses instances with more variables).
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u32,
}

#[derive(Args)]
struct AmplitudeArgs {
    /// Circuit file, or `-` for stdin.
    input: String,
    /// Cross-check against the statevector oracle; exit 3 on mismatch.
    #[arg(long, alias = "oracle")]
    check: bool,
    /// Boundary state on both sides.
    #[arg(long, value_enum, default_value = "plus")]
    boundary: BoundaryArg,
    #[arg(long)]
    node_cap: Option<u64>,
    /// Print search statistics after the amplitude.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Plus,
    Zero,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Boundary {
        match b {
            BoundaryArg::Plus => Boundary::Plus,
            BoundaryArg::Zero => Boundary::Zero,
        }
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count(args) => run_count(&args),
        Command::Oracle(args) => run_oracle(&args),
        Command::Reduce(args) => run_reduce(&args),
        Command::Stats(args) => run_stats(&args),
        Command::Amplitude(args) => run_amplitude(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("gapsat: {err:#}");
            let code = match err.downcast_ref::<SolveError>() {
                Some(SolveError::Budget { .. }) => EXIT_BUDGET,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// 12 significant digits, scientific.
fn sig12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0
    if x == 0.0 {
        "0e0".into()
    } else {
        format!("{x:.11e}")
    }
}

fn format_complex(z: Complex64) -> String {
    let re = sig12(z.re);
    let im = sig12(z.im);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn solve_options(args: &CountArgs) -> SolveOptions {
    SolveOptions {
        strategy: args.strategy.into(),
        split_components: !args.no_components,
        absorb_degree_one: args.absorb,
        node_cap: args.node_cap,
    }
}

fn dispatch<R: Ring>(
    formula: &WeightedFormula<R>,
    algo: Algo,
    opts: &SolveOptions,
) -> Result<CountResult<R>, SolveError> {
    match algo {
        Algo::Cdp => cdp(formula, opts),
        Algo::Cdp2 => cdp_to2(formula, opts),
        Algo::Cdp3to2 => cdp_3to2(formula, opts),
        Algo::Weighted => cdp_weighted(formula, opts),
    }
}

fn print_stats(stats: &SearchStats, format: Format) {
    let sep = match format {
        Format::Text => ": ",
        Format::KeyValue => "=",
    };
    println!("branch_nodes{sep}{}", stats.branch_nodes);
    println!("propagations{sep}{}", stats.propagations);
    println!("components{sep}{}", stats.components);
    println!("absorptions{sep}{}", stats.absorptions);
    println!("max_depth{sep}{}", stats.max_depth);
}

fn run_count(args: &CountArgs) -> anyhow::Result<ExitCode> {
    let text = read_input(&args.input)?;
    let opts = solve_options(args);
    match parse_dimacs_auto(&text)? {
        AnyFormula::Int(formula) => {
            let result = dispatch(&formula, args.algo, &opts)?;
            match args.format {
                Format::Text => println!("{}", result.count),
                Format::KeyValue => println!("count={}", result.count),
            }
            if args.stats {
                print_stats(&result.stats, args.format);
            }
            if args.check {
                return check_against_oracle(&formula, &result.count);
            }
            Ok(ExitCode::SUCCESS)
        }
        AnyFormula::Complex(formula) => {
            let result = dispatch(&formula, args.algo, &opts)?;
            match args.format {
                Format::Text => println!("{}", format_complex(result.count)),
                Format::KeyValue => println!("count={}", format_complex(result.count)),
            }
            if args.stats {
                print_stats(&result.stats, args.format);
            }
            if args.check {
                let n = formula.variable_count();
                match brute_force_count_capped(&formula, DEFAULT_ENUMERATION_CAP) {
                    Ok(expected) => {
                        let dev = (result.count - expected).norm();
                        return finish_check(dev, 1e-9 * f64::max(1.0, expected.norm()));
                    }
                    Err(OracleError::CapExceeded { cap, .. }) => {
                        println!("check: skipped ({n} variables over the enumeration cap {cap})");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn check_against_oracle(formula: &WeightedFormula<Int>, got: &Int) -> anyhow::Result<ExitCode> {
    let n = formula.variable_count();
    match brute_force_count_capped(formula, DEFAULT_ENUMERATION_CAP) {
        Ok(expected) if &expected == got => {
            println!("check: ok (dev 0.0e0)");
            Ok(ExitCode::SUCCESS)
        }
        Ok(expected) => {
            eprintln!("gapsat: count {got} disagrees with the enumeration oracle {expected}");
            Ok(ExitCode::from(EXIT_MISMATCH))
        }
        Err(OracleError::CapExceeded { cap, .. }) => {
            println!("check: skipped ({n} variables over the enumeration cap {cap})");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err(e.into()),
    }
}

fn finish_check(dev: f64, tolerance: f64) -> anyhow::Result<ExitCode> {
    if dev <= tolerance {
        println!("check: ok (dev {dev:.1e})");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("gapsat: deviation {dev:.3e} from the oracle exceeds {tolerance:.3e}");
        Ok(ExitCode::from(EXIT_MISMATCH))
    }
}

fn run_oracle(args: &OracleArgs) -> anyhow::Result<ExitCode> {
    let text = read_input(&args.input)?;
    match parse_dimacs_auto(&text)? {
        AnyFormula::Int(formula) => {
            println!("{}", brute_force_count_capped(&formula, args.cap)?);
        }
        AnyFormula::Complex(formula) => {
            println!("{}", format_complex(brute_force_count_capped(&formula, args.cap)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_reduce(args: &InputArg) -> anyhow::Result<ExitCode> {
    let text = read_input(&args.input)?;
    let AnyFormula::Int(formula) = parse_dimacs_auto(&text)? else {
        anyhow::bail!("the reduction is defined for plain instances");
    };
    let (reduced, map) = reduce_to_signed_2sat(&formula)?;
    let serialized = serialize_dimacs(&reduced);
    let (header, rest) = serialized.split_once('\n').expect("nonempty serialization");
    let mut out = String::new();
    writeln!(out, "{header}")?;
    writeln!(out, "c map original-variables {}", map.original_variables)?;
    for (clause, var) in &map.fresh_variables {
        writeln!(out, "c map fresh {} {}", clause + 1, var.index())?;
    }
    for (i, origin) in map.clause_origins.iter().enumerate() {
        match origin {
            ClauseOrigin::Copied { clause } => {
                writeln!(out, "c map clause {} copied {}", i + 1, clause + 1)?;
            }
            ClauseOrigin::Generated { clause, literal } => {
                writeln!(out, "c map clause {} generated {} {}", i + 1, clause + 1, literal + 1)?;
            }
        }
    }
    print!("{out}{rest}");
    Ok(ExitCode::SUCCESS)
}

fn optional_f64(x: Option<f64>, digits: usize) -> String {
    match x {
        Some(v) => format!("{v:.digits$}"),
        None => "-".into(),
    }
}

fn optional_ratio(r: Option<num::rational::Ratio<u64>>) -> String {
    match r {
        Some(r) => bounds::ratio_decimal(r, 4),
        None => "-".into(),
    }
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

fn run_stats(args: &InputArg) -> anyhow::Result<ExitCode> {
    let text = read_input(&args.input)?;
    let stats = match parse_dimacs_auto(&text)? {
        AnyFormula::Int(f) => instance_stats(&f),
        AnyFormula::Complex(f) => instance_stats(&f),
    };
    let report = bounds::bound_report(&stats);
    print_stats_text(&stats, &report);
    println!();
    print_stats_keyvalue(&stats, &report);
    Ok(ExitCode::SUCCESS)
}

fn print_stats_text(stats: &InstanceStats, report: &bounds::BoundReport) {
    println!("instance");
    println!("  variables         {}", stats.variable_count);
    println!("  clauses           {}", stats.clause_count);
    println!("  wide clauses      {}", stats.wide_clause_count);
    println!("  max width         {}", stats.max_width);
    println!("  literals          {}", stats.literal_count);
    println!("  wide literals     {}", stats.wide_literal_count);
    println!("  max degree        {}", stats.max_degree);
    println!("  density           {}", optional_ratio(stats.density()));
    println!("  3-clause density  {}", optional_ratio(stats.three_density()));
    println!("  average degree    {}", optional_ratio(stats.average_degree()));
    println!("bounds");
    println!(
        "  density exponent  {}  beats 2^n: {}",
        optional_f64(report.density_exponent, 6),
        yes_no(report.density_beats_brute_force)
    );
    println!(
        "  literal exponent  {}  beats 2^n: {}",
        optional_f64(report.literal_exponent, 6),
        yes_no(report.literal_beats_brute_force)
    );
    match report.thresholds.worst_case {
        Some(v) => {
            let extra = match v.requires_density_above {
                Some(min) => format!(" (needs density above {min:.4})"),
                None => String::new(),
            };
            println!(
                "  worst-case row    threshold {:.4}  improves: {}{extra}",
                v.threshold,
                if v.improves { "yes" } else { "no" }
            );
        }
        None => println!("  worst-case row    -"),
    }
    match report.thresholds.average_case {
        Some(v) => println!(
            "  average-case row  threshold {:.4}  improves: {}",
            v.threshold,
            if v.improves { "yes" } else { "no" }
        ),
        None => println!("  average-case row  -"),
    }
    match report.three_sat {
        Some(t) => println!(
            "  dense-3 bound     base {:.4} per variable (degree cap {})",
            t.base, t.degree_cap
        ),
        None => println!("  dense-3 bound     -"),
    }
}

fn print_stats_keyvalue(stats: &InstanceStats, report: &bounds::BoundReport) {
    println!("n={}", stats.variable_count);
    println!("m={}", stats.clause_count);
    println!("m3={}", stats.wide_clause_count);
    println!("k={}", stats.max_width);
    println!("L={}", stats.literal_count);
    println!("L3={}", stats.wide_literal_count);
    println!("d={}", stats.max_degree);
    println!("delta={}", optional_ratio(stats.density()));
    println!("delta3={}", optional_ratio(stats.three_density()));
    println!("dhat={}", optional_ratio(stats.average_degree()));
    println!("density_exponent={}", optional_f64(report.density_exponent, 6));
    println!("density_beats={}", yes_no(report.density_beats_brute_force));
    println!("literal_exponent={}", optional_f64(report.literal_exponent, 6));
    println!("literal_beats={}", yes_no(report.literal_beats_brute_force));
    match report.thresholds.worst_case {
        Some(v) => {
            println!("worst_threshold={:.4}", v.threshold);
            println!("worst_improves={}", if v.improves { "yes" } else { "no" });
        }
        None => {
            println!("worst_threshold=-");
            println!("worst_improves=no");
        }
    }
    match report.thresholds.average_case {
        Some(v) => {
            println!("avg_threshold={:.4}", v.threshold);
            println!("avg_improves={}", if v.improves { "yes" } else { "no" });
        }
        None => {
            println!("avg_threshold=-");
            println!("avg_improves=no");
        }
    }
    match report.three_sat {
        Some(t) => {
            println!("three_sat_degree_cap={}", t.degree_cap);
            println!("three_sat_base={:.6}", t.base);
        }
        None => {
            println!("three_sat_degree_cap=-");
            println!("three_sat_base=-");
        }
    }
}

fn run_amplitude(args: &AmplitudeArgs) -> anyhow::Result<ExitCode> {
    let text = read_input(&args.input)?;
    let circuit = parse_circuit(&text)?;
    let boundary: Boundary = args.boundary.into();
    let opts = AmplitudeOptions {
        input: boundary,
        output: boundary,
        solve: SolveOptions { node_cap: args.node_cap, ..SolveOptions::default() },
    };
    let (value, stats) = amplitude_with(&circuit, &opts)?;
    println!("{}", format_complex(value));
    if args.stats {
        print_stats(&stats, Format::Text);
    }
    if args.check {
        if circuit.qubit_count() > STATEVECTOR_QUBIT_CAP {
            println!(
                "check: skipped ({} qubits over the statevector cap {})",
                circuit.qubit_count(),
                STATEVECTOR_QUBIT_CAP
            );
            return Ok(ExitCode::SUCCESS);
        }
        let expected = statevector_amplitude_with(&circuit, boundary, boundary)?;
        let dev = (value - expected).norm();
        return finish_check(dev, 1e-9 * f64::max(1.0, expected.norm()));
    }
    Ok(ExitCode::SUCCESS)
}
