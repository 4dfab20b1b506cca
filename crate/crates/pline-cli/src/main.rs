//! `pline`: solvers, reductions and generators over JSON instance files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use pline::contraction::{
    dcm_to_ufeopl, direction_grid_from_map, find_fp_approx, find_fp_exact, grid_from_circuit, validate_dcm, within_schedule,
    DirectionGrid, GridSpec,
};
use pline::exact::{format_rational, parse_rational};
use pline::gen::{gen_affine_contraction, gen_dcm, gen_dcm_scaled, gen_plcp};
use pline::lcp::{enumerate_complementary_bases, is_p_matrix, lemke_solve, verify_lcp_result, LcpInstance, LcpResult};
use pline::line::{
    aldous_solve, check_eoml_solution, check_eopl_solution, check_ufeopl_solution, default_budget, default_samples,
    follow_forward, follow_line, gen_line_tables, make_explicit_instance, materialize_eoml, materialize_eopl, materialize_ufeopl,
    ExplicitTables, LineInstance,
};
use pline::linfixp::{lp_norm, parse_circuit, sub_vec, AffineMap, EvaluableMap, NormIndex};
use pline::plcp::{build_plcp_eopl, PlcpBuild};
use pline::reductions::{eoml_to_eopl, eopl_to_eoml, pullback_eoml_solution, EoplToEoml};
use pline::{BitVector, EoplInstance, Error, Rational, Solution};

const EXIT_Q2: u8 = 10;
const EXIT_RAY: u8 = 11;
const EXIT_BUDGET: u8 = 12;
const EXIT_INPUT: u8 = 2;
const EXIT_FAILED: u8 = 1;

/// Budget for tabulating direction grids and validating DCM files.
const GRID_BUDGET: u64 = 1 << 22;

#[derive(Parser)]
#[command(name = "pline", version, about = "Potential-line problems, P-LCPs and contraction fixpoints")]
struct Cli {
    /// Print machine-readable JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an LCP file with Lemke's method. Exit 0 on Q1, 10 on Q2, 11 on a secondary ray.
    Lemke {
        file: PathBuf,
        /// Also check the result against brute-force basis enumeration (d <= 12).
        #[arg(long)]
        check: bool,
    },
    /// Materialize a reduction image as explicit tables (image width at most 20).
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        input: PathBuf,
        output: PathBuf,
    },
    /// Solve an explicit EOPL, EOML or UFEOPL table file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Follow)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Aldous sample count, default ceil(2^(n/2)).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Write a deterministic generated instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Contraction fixpoints from a circuit file or an affine map {A, b} in JSON.
    #[command(subcommand)]
    Contraction(ContractionCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    EomlToEopl,
    EoplToEoml,
    PlcpToEopl,
    DcmToUfeopl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Follow,
    Aldous,
}

#[derive(Args)]
struct GenOut {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Diagonally dominant P-matrix LCP.
    Plcp {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// EOPL tables with a single line from 0^n.
    Line {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        length: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Affine DCM on the grid k_i = 4^(d-i)*base.
    Dcm {
        #[arg(long)]
        d: usize,
        /// Default 8 for d <= 2 and 2 for d = 3.
        #[arg(long)]
        base: Option<u64>,
        #[command(flatten)]
        out: GenOut,
    },
    /// Affine contraction with a fixpoint on the grid of width k.
    Affine {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 8)]
        k: u64,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Subcommand)]
enum ContractionCommand {
    Exact {
        file: PathBuf,
        /// Grid widths k_1,...,k_d; required for affine JSON input.
        #[arg(long, value_delimiter = ',')]
        grid_override: Option<Vec<u64>>,
        /// Norm for the reported residual, default the circuit's p.
        #[arg(long)]
        p: Option<String>,
    },
    Approx {
        file: PathBuf,
        #[arg(long)]
        eps: String,
        /// Norm index, default the circuit's p; required for affine JSON input.
        #[arg(long)]
        p: Option<String>,
    },
}

/// A DCM file: grid widths plus either an affine map or a direction table.
#[derive(Serialize, Deserialize)]
struct DcmFile {
    k: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<AffineMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<String>>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted(_) => EXIT_BUDGET,
            Error::Parse(_)
            | Error::Syntax { .. }
            | Error::Dimension(_)
            | Error::Argument(_)
            | Error::Circuit(_)
            | Error::Capability(_)
            | Error::Invariant(_) => EXIT_INPUT,
            _ => EXIT_FAILED,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn internal(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILED, message: message.into() }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn step_budget(n: usize) -> Result<u64, Failure> {
    match std::env::var("PLINE_STEP_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| input_error(format!("PLINE_STEP_BUDGET must be an integer, got {s:?}"))),
        Err(_) => Ok(default_budget(n)),
    }
}

fn fmt_vec(v: &[Rational]) -> String {
    let xs: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", xs.join(", "))
}

fn report(json: bool, value: serde_json::Value, summary: String) {
    if json {
        println!("{}", pretty(&value));
    } else {
        println!("{summary}");
    }
}

fn cmd_lemke(file: &Path, check: bool, json: bool) -> CmdResult {
    let inst = LcpInstance::from_json(&read(file)?)?;
    let res = lemke_solve(&inst)?;
    if !verify_lcp_result(&inst, &res) {
        return Err(internal(format!("Lemke result failed verification: {res:?}")));
    }
    if check {
        if let LcpResult::Q1 { y } = &res {
            let all = enumerate_complementary_bases(&inst)?;
            if !all.contains(y) {
                return Err(internal("solution is not among the enumerated complementary bases"));
            }
            let p_matrix = is_p_matrix(inst.matrix())?.is_none();
            if p_matrix && all.len() != 1 {
                return Err(internal(format!("P-matrix LCP with {} solutions", all.len())));
            }
        }
    }
    let (summary, code) = match &res {
        LcpResult::Q1 { y } => (format!("Q1 y = {}", fmt_vec(y)), 0),
        LcpResult::Q2 { index_set, minor } => {
            (format!("Q2 principal minor on {index_set:?} = {}", format_rational(minor)), EXIT_Q2)
        }
        LcpResult::SecondaryRay { .. } => ("secondary ray".to_string(), EXIT_RAY),
    };
    report(json, serde_json::to_value(&res).expect("serializable"), summary);
    Ok(code)
}

fn reduced_tables(kind: ReduceKind, input: &Path) -> Result<Result<ExplicitTables, serde_json::Value>, Failure> {
    Ok(match kind {
        ReduceKind::EomlToEopl => {
            let src = read_json::<ExplicitTables>(input)?.to_eoml()?;
            Ok(materialize_eopl(&eoml_to_eopl(&src)?)?)
        }
        ReduceKind::EoplToEoml => {
            let src = read_json::<ExplicitTables>(input)?.to_eopl()?;
            match eopl_to_eoml(&src)? {
                EoplToEoml::Reduced(img) => Ok(materialize_eoml(&img)?),
                EoplToEoml::Trivial(sol) => Err(json!({ "solved": sol })),
            }
        }
        ReduceKind::PlcpToEopl => {
            let src = LcpInstance::from_json(&read(input)?)?;
            match build_plcp_eopl(&src)? {
                PlcpBuild::Reduced(r) => Ok(materialize_eopl(r.eopl())?),
                PlcpBuild::Solved(res) => Err(json!({ "solved": res })),
            }
        }
        ReduceKind::DcmToUfeopl => {
            let dg = load_dcm(input)?;
            Ok(materialize_ufeopl(dcm_to_ufeopl(&dg)?.instance())?)
        }
    })
}

fn load_dcm(path: &Path) -> Result<DirectionGrid, Failure> {
    let f: DcmFile = read_json(path)?;
    let dg = match (f.map, f.table) {
        (Some(map), None) => direction_grid_from_map(Arc::new(map), &GridSpec::with_sizes(&f.k)?)?.tabulate(GRID_BUDGET)?,
        (None, Some(rows)) => DirectionGrid::from_table_strings(&f.k, &rows)?,
        _ => return Err(input_error("a DCM file needs exactly one of \"map\" or \"table\"")),
    };
    if let Some(v) = validate_dcm(&dg, GRID_BUDGET)? {
        return Err(input_error(format!("not a DCM: {v:?}")));
    }
    Ok(dg)
}

fn cmd_reduce(kind: ReduceKind, input: &Path, output: &Path, json: bool) -> CmdResult {
    match reduced_tables(kind, input)? {
        Ok(tables) => {
            // the written tables must load with all boundary conditions intact
            make_explicit_instance(&tables)?;
            write(Some(output), &pretty(&tables))?;
            let summary = format!("wrote {:?} tables with n = {} to {}", tables.kind, tables.n, output.display());
            report(json, json!({ "kind": tables.kind, "n": tables.n, "m": tables.m, "out": output }), summary);
        }
        Err(solved) => {
            let summary = format!("source is already solved, no image written: {solved}");
            report(json, solved, summary);
        }
    }
    Ok(0)
}

fn eopl_solve(inst: &EoplInstance, method: Method, seed: u64, samples: Option<u64>) -> Result<(Solution, u64), Failure> {
    let budget = step_budget(inst.n())?;
    Ok(match method {
        Method::Follow => {
            let w = follow_line(inst, &BitVector::zeros(inst.n()), budget)?;
            (w.solution, w.steps)
        }
        Method::Aldous => {
            let k = samples.unwrap_or_else(|| default_samples(inst.n()));
            let out = aldous_solve(inst, k, seed, budget)?;
            (out.solution, out.walk_steps)
        }
    })
}

fn cmd_solve(file: &Path, method: Method, seed: u64, samples: Option<u64>, json: bool) -> CmdResult {
    let tables: ExplicitTables = read_json(file)?;
    let (sol, steps) = match make_explicit_instance(&tables)? {
        LineInstance::Eopl(inst) => {
            let (sol, steps) = eopl_solve(&inst, method, seed, samples)?;
            if !check_eopl_solution(&inst, &sol) {
                return Err(internal(format!("solution failed verification: {sol:?}")));
            }
            (sol, steps)
        }
        LineInstance::Eoml(inst) => {
            let image = eoml_to_eopl(&inst)?;
            let (img_sol, steps) = eopl_solve(&image, method, seed, samples)?;
            let sol = pullback_eoml_solution(&inst, &image, &img_sol)?;
            if !check_eoml_solution(&inst, &sol) {
                return Err(internal(format!("solution failed verification: {sol:?}")));
            }
            (sol, steps)
        }
        LineInstance::Ufeopl(inst) => {
            if method == Method::Aldous {
                return Err(input_error("aldous needs a predecessor circuit; use --method follow for UFEOPL"));
            }
            let w = follow_forward(&inst, &BitVector::zeros(inst.n()), step_budget(inst.n())?)?;
            if !check_ufeopl_solution(&inst, &w.solution) {
                return Err(internal(format!("solution failed verification: {:?}", w.solution)));
            }
            (w.solution, w.steps)
        }
    };
    let witness: Vec<String> = sol.witness.iter().map(|x| x.to_bitstring()).collect();
    let summary = format!("{:?} at {} after {steps} steps", sol.kind, witness.join(" "));
    report(json, json!({ "solution": sol, "steps": steps }), summary);
    Ok(0)
}

fn cmd_gen(cmd: &GenCommand) -> CmdResult {
    let (text, out) = match cmd {
        GenCommand::Plcp { d, out } => (gen_plcp(*d, out.seed)?.to_json(), out),
        GenCommand::Line { n, length, out } => (pretty(&gen_line_tables(*n, *length, out.seed)?), out),
        GenCommand::Dcm { d, base, out } => {
            let (map, grid) = match base {
                Some(b) => gen_dcm_scaled(*d, *b, out.seed)?,
                None => gen_dcm(*d, out.seed)?,
            };
            let k = grid.small_widths()?;
            (pretty(&DcmFile { k, map: Some(map), table: None }), out)
        }
        GenCommand::Affine { d, k, out } => (pretty(&gen_affine_contraction(*d, *k, out.seed)?.0), out),
    };
    write(out.out.as_deref(), &text)?;
    Ok(0)
}

enum MapInput {
    Circuit(pline::linfixp::LinFixpCircuit),
    Affine(AffineMap),
}

impl MapInput {
    fn load(path: &Path) -> Result<Self, Failure> {
        let text = read(path)?;
        if text.trim_start().starts_with('{') {
            let map = serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            Ok(MapInput::Affine(map))
        } else {
            Ok(MapInput::Circuit(parse_circuit(&text)?))
        }
    }

    fn map(&self) -> &dyn EvaluableMap {
        match self {
            MapInput::Circuit(c) => c,
            MapInput::Affine(a) => a,
        }
    }

    fn norm(&self, flag: Option<&str>) -> Result<NormIndex, Failure> {
        match (flag, self) {
            (Some(s), _) => Ok(NormIndex::parse(s)?),
            (None, MapInput::Circuit(c)) => Ok(c.norm()),
            (None, MapInput::Affine(_)) => Err(input_error("--p is required for affine map input")),
        }
    }
}

fn residual(f: &dyn EvaluableMap, x: &[Rational], p: NormIndex) -> Rational {
    lp_norm(&sub_vec(&f.eval(x), x), p)
}

fn cmd_exact(file: &Path, grid_override: Option<&[u64]>, p: Option<&str>, json: bool) -> CmdResult {
    let input = MapInput::load(file)?;
    let grid = match (grid_override, &input) {
        (Some(k), _) => GridSpec::with_sizes(k)?,
        (None, MapInput::Circuit(c)) => grid_from_circuit(c),
        (None, MapInput::Affine(_)) => return Err(input_error("--grid-override is required for affine map input")),
    };
    let norm = input.norm(p)?;
    let f = input.map();
    let r = find_fp_exact(f, &grid)?;
    let res = residual(f, &r.point, norm);
    if !num_traits::Zero::is_zero(&res) {
        return Err(internal(format!("point {} is not a fixpoint", fmt_vec(&r.point))));
    }
    let summary = format!("x = {} after {} queries", fmt_vec(&r.point), r.queries);
    let x: Vec<String> = r.point.iter().map(format_rational).collect();
    let value = json!({ "x": x, "residual": format_rational(&res), "queries": r.queries, "refined": r.refined });
    report(json, value, summary);
    Ok(0)
}

fn cmd_approx(file: &Path, eps: &str, p: Option<&str>, json: bool) -> CmdResult {
    let input = MapInput::load(file)?;
    let norm = input.norm(p)?;
    let eps = parse_rational(eps)?;
    let f = input.map();
    let r = find_fp_approx(f, norm, &eps)?;
    let res = residual(f, &r.point, norm);
    let bound = norm.scale_power(&eps);
    if res >= bound || !within_schedule(f, &r.point, &r.schedule) {
        return Err(internal(format!("point {} misses the tolerance", fmt_vec(&r.point))));
    }
    let summary = format!(
        "x = {} with residual {} < {} after {} queries",
        fmt_vec(&r.point),
        format_rational(&res),
        format_rational(&bound),
        r.queries
    );
    let x: Vec<String> = r.point.iter().map(format_rational).collect();
    let value = json!({
        "x": x,
        "p": norm.to_string(),
        "residual_power": format_rational(&res),
        "bound": format_rational(&bound),
        "queries": r.queries,
    });
    report(json, value, summary);
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.cmd {
        Command::Lemke { file, check } => cmd_lemke(file, *check, cli.json),
        Command::Reduce { kind, input, output } => cmd_reduce(*kind, input, output, cli.json),
        Command::Solve { file, method, seed, samples } => cmd_solve(file, *method, *seed, *samples, cli.json),
        Command::Gen(g) => cmd_gen(g),
        Command::Contraction(ContractionCommand::Exact { file, grid_override, p }) => {
            cmd_exact(file, grid_override.as_deref(), p.as_deref(), cli.json)
        }
        Command::Contraction(ContractionCommand::Approx { file, eps, p }) => cmd_approx(file, eps, p.as_deref(), cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
