//! The `ecic` command line. [`run`] parses arguments, writes the report to
//! `out` and diagnostics to `err`, and returns the process exit code:
//! 0 success, 1 a verified negative answer, 2 bad input, 3 budget exhausted.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bounds::{bounds_report, random_coding_length};
use crate::budget::{Budgets, DEFAULT_NODE_BUDGET};
use crate::construct_search::{
    concatenate_construction, concatenate_with_best_outer, mds_generator, optimal_length_search, random_construct,
    LengthVerdict,
};
use crate::decoder::{exhaustive_correctness_check, simulate_round, DecodeOutcome, ErrorPattern};
use crate::error::{Error, Result};
use crate::field_linalg::{Elem, FMatrix, FVector, Field, DEFAULT_ENUMERATION_BUDGET};
use crate::index_codes::{
    builtin_matrix, correction_radius, ic_matrix_from_witness, instance_params, min_rank, verify_ecic,
    verify_ecic_direct, CorrectionRadius, LinearIndexCode, DEFAULT_ALPHA_CAP, DEFAULT_ASSIGNMENT_BUDGET,
};
use crate::instance::{builtin_instance, parse_instance, IcsiInstance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    /// One JSON document per line; only `simulate` emits more than one.
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Min-rank index code followed by a shortest outer code.
    Concat,
    /// Uniform random matrices until one verifies.
    Random,
    /// Min-rank index code followed by a Reed–Solomon outer code.
    MdsConcat,
}

#[derive(Debug, Parser)]
#[command(
    name = "ecic",
    version,
    about = "Error-correcting index codes: verification, bounds, search and decoding"
)]
pub struct RunConfig {
    /// Instance JSON file, or a built-in name: pentagon, example1,
    /// odd-cycle-complement:<l>, no-side-info:<n>.
    #[arg(long, global = true, default_value = "pentagon")]
    pub instance: String,
    /// Matrix text file, or a built-in name: pentagon, example1.
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// Field order. Defaults to the matrix's field, else 2.
    #[arg(long, global = true)]
    pub q: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub delta: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Backtracking nodes allowed per length in the column searches.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Vectors any single enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub enum_budget: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the instance (and matrix, if given) and summarize it.
    Validate,
    /// α(H) and κ_q(H) with witnesses.
    Params,
    /// All bounds on the optimal length at the given δ.
    Bounds,
    /// Check that the matrix is a (δ, H)-ECIC.
    Verify,
    /// Largest δ the matrix corrects.
    Radius,
    /// Exact optimal length by exhaustive search.
    Search,
    /// Build an encoding matrix.
    Construct {
        #[arg(long, value_enum, default_value_t = Strategy::Concat)]
        strategy: Strategy,
        /// Code length for the random strategy; defaults to the random-coding length.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Encode, inject errors and decode at every receiver.
    Simulate {
        /// Message vector x; random from the seed when omitted.
        #[arg(long)]
        message: Option<String>,
        /// Error vector shared by all receivers.
        #[arg(long, conflicts_with = "random_errors")]
        error: Option<String>,
        /// Give each receiver its own random error of exactly this weight.
        #[arg(long)]
        random_errors: Option<usize>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
    /// Decode every message under every error of weight ≤ δ.
    Check,
}

impl RunConfig {
    fn budgets(&self) -> Budgets {
        Budgets {
            enumeration: self.enum_budget,
            nodes: self.node_budget,
            assignments: DEFAULT_ASSIGNMENT_BUDGET,
            alpha_cap: DEFAULT_ALPHA_CAP,
            jobs: self.jobs.max(1),
        }
    }
}

/// A finished command: the report and its exit code.
struct Report {
    json: Value,
    text: String,
    code: i32,
    /// Extra JSON lines for `--format jsonl`; `json` is used when empty.
    lines: Vec<Value>,
}

impl Report {
    fn new(json: Value, text: String, code: i32) -> Self {
        Report {
            json,
            text,
            code,
            lines: Vec::new(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    run_config(&cfg, out, err)
}

pub fn run_config(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cfg, err) {
        Ok(report) => {
            let written = match cfg.format {
                Format::Text => write!(out, "{}", report.text),
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json).unwrap()),
                Format::Jsonl if report.lines.is_empty() => writeln!(out, "{}", report.json),
                Format::Jsonl => report.lines.iter().try_for_each(|l| writeln!(out, "{l}")),
            };
            if written.is_err() {
                return EXIT_INPUT;
            }
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn load_instance(spec: &str) -> Result<IcsiInstance> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::MalformedDocument(format!("{spec}: {e}")))?;
        parse_instance(&text)
    } else {
        builtin_instance(spec)
    }
}

fn load_matrix(spec: &str) -> Result<FMatrix> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::MalformedDocument(format!("{spec}: {e}")))?;
        FMatrix::from_text(&text)
    } else {
        builtin_matrix(spec)
    }
}

struct Inputs {
    inst: IcsiInstance,
    field: Field,
    matrix: Option<FMatrix>,
}

fn inputs(cfg: &RunConfig) -> Result<Inputs> {
    let inst = load_instance(&cfg.instance)?;
    let matrix = cfg.matrix.as_deref().map(load_matrix).transpose()?;
    let field = match (&matrix, cfg.q) {
        (Some(m), Some(q)) if m.field().q() != q => {
            return Err(Error::FieldMismatch {
                left: q,
                right: m.field().q(),
            })
        }
        (Some(m), _) => m.field().clone(),
        (None, q) => Field::new(q.unwrap_or(2))?,
    };
    Ok(Inputs { inst, field, matrix })
}

fn require_code(inp: &Inputs) -> Result<LinearIndexCode> {
    let matrix = inp
        .matrix
        .clone()
        .ok_or_else(|| Error::MalformedDocument("this command needs --matrix".into()))?;
    LinearIndexCode::new(inp.inst.clone(), matrix)
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}

fn dispatch(cfg: &RunConfig, err: &mut dyn Write) -> Result<Report> {
    let inp = inputs(cfg)?;
    let budgets = cfg.budgets();
    match &cfg.command {
        Command::Validate => validate(&inp),
        Command::Params => params(&inp, &budgets),
        Command::Bounds => bounds(&inp, cfg.delta, &budgets),
        Command::Verify => verify(&inp, cfg.delta, &budgets),
        Command::Radius => radius(&inp, &budgets),
        Command::Search => search(&inp, cfg.delta, &budgets, err),
        Command::Construct {
            strategy,
            length,
            trials,
        } => construct(&inp, cfg, *strategy, *length, *trials, &budgets),
        Command::Simulate {
            message,
            error,
            random_errors,
            rounds,
        } => simulate(&inp, cfg, message.as_deref(), error.as_deref(), *random_errors, *rounds),
        Command::Check => check(&inp, cfg.delta, &budgets),
    }
}

fn validate(inp: &Inputs) -> Result<Report> {
    let inst = &inp.inst;
    let edges: Vec<Value> = inst
        .hyperedges()
        .map(|(f, x)| json!({"demand": f + 1, "side_info": one_based(x)}))
        .collect();
    let mut json = json!({
        "valid": true,
        "m": inst.receivers(),
        "n": inst.messages(),
        "receivers": edges,
    });
    let mut text = format!("instance: m = {}, n = {}\n", inst.receivers(), inst.messages());
    for (i, (f, x)) in inst.hyperedges().enumerate() {
        text += &format!("  R{}: demands x{}, knows {:?}\n", i + 1, f + 1, one_based(x));
    }
    if let Some(m) = &inp.matrix {
        LinearIndexCode::new(inst.clone(), m.clone())?;
        json["matrix"] = json!({"q": m.field().q(), "rows": m.rows(), "cols": m.cols()});
        text += &format!("matrix: {} x {} over GF({})\n", m.rows(), m.cols(), m.field().q());
    }
    Ok(Report::new(json, text, EXIT_OK))
}

fn params(inp: &Inputs, budgets: &Budgets) -> Result<Report> {
    let p = instance_params(&inp.inst, &inp.field, budgets.alpha_cap, budgets.assignments)?;
    let ic = ic_matrix_from_witness(&p.kappa.rows);
    let json = json!({
        "q": p.q,
        "alpha": p.alpha.alpha,
        "alpha_witness": one_based(&p.alpha.witness),
        "kappa": p.kappa.kappa,
        "kappa_rows": p.kappa.rows.to_text(),
        "ic_matrix": ic.to_text(),
    });
    let text = format!(
        "q      {}\nalpha  {}  witness {:?}\nkappa  {}\nmin-rank rows:\n{}",
        p.q,
        p.alpha.alpha,
        one_based(&p.alpha.witness),
        p.kappa.kappa,
        p.kappa.rows.to_text()
    );
    Ok(Report::new(json, text, EXIT_OK))
}

fn bounds(inp: &Inputs, delta: usize, budgets: &Budgets) -> Result<Report> {
    let r = bounds_report(&inp.inst, &inp.field, delta, budgets);
    let code = if r.unknown.is_empty() { EXIT_OK } else { EXIT_BUDGET };
    Ok(Report::new(serde_json::to_value(&r).unwrap(), r.to_text(), code))
}

fn radius_value(r: CorrectionRadius) -> Value {
    match r {
        CorrectionRadius::Unbounded => json!("unbounded"),
        CorrectionRadius::NotEvenIc => json!(null),
        CorrectionRadius::Radius(d) => json!(d),
    }
}

fn radius_text(r: CorrectionRadius) -> String {
    match r {
        CorrectionRadius::Unbounded => "unbounded (no receivers)".into(),
        CorrectionRadius::NotEvenIc => "none (not an index code)".into(),
        CorrectionRadius::Radius(d) => d.to_string(),
    }
}

fn verify(inp: &Inputs, delta: usize, budgets: &Budgets) -> Result<Report> {
    let code = require_code(inp)?;
    let verdict = verify_ecic(&code, delta, budgets.enumeration)?;
    // The direct route is an independent check of the same predicate.
    let direct = verify_ecic_direct(&code, delta, budgets.enumeration)?;
    if direct.valid != verdict.valid {
        return Err(Error::InternalContradiction(
            "margin and enumeration routes disagree".into(),
        ));
    }
    let radius = correction_radius(&code, budgets.enumeration)?;
    let certificate = verdict.violation.as_ref().map(|v| {
        json!({
            "receiver": v.receiver.map(|r| r + 1),
            "z": v.z.to_string(),
            "weight": v.weight,
        })
    });
    let json = json!({
        "valid": verdict.valid,
        "delta": delta,
        "q": code.field().q(),
        "length": code.length(),
        "margins": verdict.margins,
        "radius": radius_value(radius),
        "certificate": certificate,
    });
    let mut text = format!(
        "{} ({}, H)-ECIC of length {} over GF({})\n",
        if verdict.valid { "PASS" } else { "FAIL" },
        delta,
        code.length(),
        code.field().q()
    );
    for (i, m) in verdict.margins.iter().enumerate() {
        text += &format!("  R{}: margin {m}\n", i + 1);
    }
    text += &format!("radius {}\n", radius_text(radius));
    if let Some(v) = &verdict.violation {
        text += &format!("certificate: z = {} with wt(zL) = {} <= {}", v.z, v.weight, 2 * delta);
        if let Some(r) = v.receiver {
            text += &format!(" (receiver {})", r + 1);
        }
        text.push('\n');
    }
    Ok(Report::new(json, text, if verdict.valid { EXIT_OK } else { EXIT_FAIL }))
}

fn radius(inp: &Inputs, budgets: &Budgets) -> Result<Report> {
    let code = require_code(inp)?;
    let r = correction_radius(&code, budgets.enumeration)?;
    let json = json!({"radius": radius_value(r)});
    Ok(Report::new(json, format!("radius {}\n", radius_text(r)), EXIT_OK))
}

fn search(inp: &Inputs, delta: usize, budgets: &Budgets, err: &mut dyn Write) -> Result<Report> {
    let out = optimal_length_search(&inp.inst, &inp.field, delta, budgets)?;
    let _ = writeln!(err, "search wall time: {:.3} s", out.stats.wall_time.as_secs_f64());
    let json = json!({
        "q": out.q,
        "delta": out.delta,
        "complete": out.complete(),
        "optimal_length": out.optimal_length,
        "infeasible_below": out.infeasible_below,
        "feasible_at": out.feasible_at,
        "start": out.start,
        "witness": out.witness.as_ref().map(|w| w.matrix().to_text()),
        "stats": out.stats,
    });
    let mut text = match out.optimal_length {
        Some(n) => format!("optimal length {n}\n"),
        None => format!(
            "budget exhausted: optimal length in [{}, {}]\n",
            out.infeasible_below.map_or(0, |b| b + 1),
            out.feasible_at
        ),
    };
    for s in &out.stats.lengths {
        let v = match s.verdict {
            LengthVerdict::Feasible => "feasible",
            LengthVerdict::Infeasible => "infeasible",
            LengthVerdict::Unknown => "unknown",
        };
        text += &format!("  N = {:<3} {:<10} {} nodes\n", s.length, v, s.nodes);
    }
    if let Some(w) = &out.witness {
        text += &format!("witness:\n{}", w.matrix().to_text());
    }
    let code = if out.complete() { EXIT_OK } else { EXIT_BUDGET };
    Ok(Report::new(json, text, code))
}

fn construct(
    inp: &Inputs,
    cfg: &RunConfig,
    strategy: Strategy,
    length: Option<usize>,
    trials: usize,
    budgets: &Budgets,
) -> Result<Report> {
    let (inst, field, delta) = (&inp.inst, &inp.field, cfg.delta);
    let mut trials_used = None;
    let code = match strategy {
        Strategy::Concat => Some(concatenate_with_best_outer(inst, field, delta, budgets)?),
        Strategy::MdsConcat => {
            let kappa = min_rank(inst, field, budgets.assignments)?;
            let g = ic_matrix_from_witness(&kappa.rows);
            let outer = if kappa.kappa == 0 {
                FMatrix::zeros(field, 0, 0)
            } else {
                mds_generator(field, kappa.kappa, kappa.kappa + 2 * delta)?
            };
            Some(concatenate_construction(inst, delta, &g, &outer, budgets)?)
        }
        Strategy::Random => {
            let n = length.unwrap_or_else(|| random_coding_length(inst, field, delta));
            let r = random_construct(inst, field, delta, n, trials, cfg.seed, None, budgets)?;
            trials_used = Some(r.trials_used);
            r.code
        }
    };
    let json = json!({
        "strategy": format!("{strategy:?}").to_lowercase(),
        "delta": delta,
        "found": code.is_some(),
        "length": code.as_ref().map(|c| c.length()),
        "matrix": code.as_ref().map(|c| c.matrix().to_text()),
        "trials_used": trials_used,
    });
    Ok(match code {
        Some(c) => Report::new(json, c.matrix().to_text(), EXIT_OK),
        None => Report::new(json, "no code found\n".into(), EXIT_FAIL),
    })
}

fn outcome_json(round: usize, o: &DecodeOutcome, error: &FVector) -> Value {
    json!({
        "round": round + 1,
        "receiver": o.receiver + 1,
        "error": error.to_string(),
        "recovered": o.recovered,
        "error_estimate": o.error_estimate.to_string(),
        "estimate_weight": o.estimate_weight,
        "within_cap": o.within_cap,
        "success": o.success,
    })
}

/// A uniformly random vector of exactly `w` nonzero entries.
fn random_error(rng: &mut ChaCha8Rng, field: &Field, len: usize, w: usize) -> Result<FVector> {
    if w > len {
        return Err(Error::OutOfRegime(format!("error weight {w} exceeds length {len}")));
    }
    let mut positions: Vec<usize> = (0..len).collect();
    let mut e = vec![0 as Elem; len];
    for k in 0..w {
        let pick = rng.gen_range(k..len);
        positions.swap(k, pick);
        e[positions[k]] = rng.gen_range(1..field.order()) as Elem;
    }
    FVector::new(field, e)
}

fn simulate(
    inp: &Inputs,
    cfg: &RunConfig,
    message: Option<&str>,
    error: Option<&str>,
    random_errors: Option<usize>,
    rounds: usize,
) -> Result<Report> {
    let code = require_code(inp)?;
    let f = code.field().clone();
    let (n, len, m) = (inp.inst.messages(), code.length(), inp.inst.receivers());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fixed_message = message.map(|s| FVector::parse(&f, s)).transpose()?;
    let fixed_error = error.map(|s| FVector::parse(&f, s)).transpose()?;
    if let Some(x) = &fixed_message {
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
    }
    if let Some(e) = &fixed_error {
        if e.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: e.len(),
            });
        }
    }

    let mut lines = Vec::new();
    let mut rounds_json = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for round in 0..rounds {
        let x = match &fixed_message {
            Some(x) => x.clone(),
            None => FVector::new(&f, (0..n).map(|_| rng.gen_range(0..f.order()) as Elem).collect())?,
        };
        let errors: Vec<FVector> = match (&fixed_error, random_errors) {
            (Some(e), _) => vec![e.clone(); m],
            (None, Some(w)) => (0..m)
                .map(|_| random_error(&mut rng, &f, len, w))
                .collect::<Result<_>>()?,
            (None, None) => vec![FVector::zeros(&f, len); m],
        };
        let outcomes = simulate_round(&code, &x, ErrorPattern::PerReceiver(&errors), cfg.delta)?;
        let y = code.encode(&x)?;
        text += &format!("round {}: x = {x}, xL = {y}\n", round + 1);
        let mut round_json = Vec::new();
        for (o, e) in outcomes.iter().zip(&errors) {
            all_ok &= o.success == Some(true);
            let line = outcome_json(round, o, e);
            text += &format!(
                "  R{}: error {e} -> estimate {} (wt {}{}), recovered {} {}\n",
                o.receiver + 1,
                o.error_estimate,
                o.estimate_weight,
                if o.within_cap { "" } else { ", beyond cap" },
                o.recovered,
                if o.success == Some(true) { "ok" } else { "WRONG" }
            );
            round_json.push(line.clone());
            lines.push(line);
        }
        rounds_json
            .push(json!({"round": round + 1, "x": x.to_string(), "codeword": y.to_string(), "receivers": round_json}));
    }
    let json = json!({"delta": cfg.delta, "all_succeeded": all_ok, "rounds": rounds_json});
    let mut report = Report::new(json, text, if all_ok { EXIT_OK } else { EXIT_FAIL });
    report.lines = lines;
    Ok(report)
}

fn check(inp: &Inputs, delta: usize, budgets: &Budgets) -> Result<Report> {
    let code = require_code(inp)?;
    let r = exhaustive_correctness_check(&code, delta, budgets.enumeration)?;
    let cx = r.counterexample.as_ref().map(|c| {
        json!({
            "x": c.x.to_string(),
            "error": c.error.to_string(),
            "receiver": c.receiver + 1,
            "expected": c.expected,
            "recovered": c.recovered,
        })
    });
    let json = json!({
        "passed": r.passed,
        "delta": delta,
        "decodes": r.decodes,
        "relevance_violations": r.relevance_violations,
        "counterexample": cx,
    });
    let mut text = format!(
        "{}: {} decodes, {} relevance violations\n",
        if r.passed { "PASS" } else { "FAIL" },
        r.decodes,
        r.relevance_violations
    );
    if let Some(c) = &r.counterexample {
        text += &format!(
            "counterexample: x = {}, error = {}, receiver {} recovered {} instead of {}\n",
            c.x,
            c.error,
            c.receiver + 1,
            c.recovered,
            c.expected
        );
    }
    Ok(Report::new(json, text, if r.passed { EXIT_OK } else { EXIT_FAIL }))
}
