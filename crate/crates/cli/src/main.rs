use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use recmds::records::{
    parse_coeff_list, read_records, write_records, Record, SolutionRecord, SummaryRecord,
};
use recmds::{
    bit_branch_oracle, branch_breakdown, branch_number_oracle, check_bound, find_k, instantiate,
    is_mds, middle_representatives, retarget_solution, run_search_with, shift_rotate_op, BinMatrix,
    BinPoly, Checkpoint, CoeffVec, Error, FieldCtx, PolyMatrix, SearchMode, SearchOptions,
    SearchSpec, ShiftSpec,
};

const EXIT_NOT_MDS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_INTERRUPTED: u8 = 130;
const ORACLE_BITS: usize = recmds::oracle::ORACLE_MAX_BITS;

/// Recursive MDS diffusion layers over GF(2^d).
#[derive(Parser)]
#[command(name = "recmds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively search companion coefficients whose ell-th power is MDS.
    Search(SearchArgs),
    /// Check solutions over a field, or against a binary operator L.
    Verify(VerifyArgs),
    /// Move solution records to another modulus of the same degree.
    Retarget(RetargetArgs),
    /// Minimal polynomial of a binary operator.
    Minpoly(OperatorArgs),
    /// Replace X by a binary operator and print the block matrix's branch number.
    Instantiate(InstantiateArgs),
    /// Check the necessary size condition 2 ell <= 2^d.
    Bound(BoundArgs),
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    ell: usize,
    /// Irreducible modulus as a hex bitmask, e.g. 0x13.
    #[arg(long)]
    modulus: String,
    #[arg(long, default_value = "full")]
    mode: String,
    /// `auto` or a comma-separated list of allowed central coefficients.
    #[arg(long)]
    middle_reps: Option<String>,
    /// Threads in this process.
    #[arg(long)]
    workers: Option<usize>,
    /// Run only stratum `i` of `n`, written `i/n`.
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Where progress is saved; defaults to the resume file, or `<out>.checkpoint`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// JSON Lines output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OperatorArgs {
    /// Operator rows as hex bitmasks, comma separated (row i, bit j = entry (i, j)).
    #[arg(long = "L", alias = "l")]
    rows: Option<String>,
    /// XOR of shifts and rotations, e.g. `shl2^rotr1`.
    #[arg(long)]
    shift_spec: Option<String>,
    /// Width of the shift-spec operator.
    #[arg(long)]
    bits: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON Lines file, or an inline list like `[1, L^-3, L, 0x8]`.
    #[arg(long)]
    solution: String,
    #[arg(long)]
    modulus: Option<String>,
    #[command(flatten)]
    operator: OperatorArgs,
}

#[derive(Args)]
struct RetargetArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    target_modulus: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstantiateArgs {
    #[arg(long)]
    solution: String,
    #[arg(long)]
    modulus: Option<String>,
    #[command(flatten)]
    operator: OperatorArgs,
    /// Block matrix rows, one hex bitmask per line.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_xor_program: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    ell: usize,
    #[arg(long, conflicts_with = "modulus", required_unless_present = "modulus")]
    degree: Option<u32>,
    #[arg(long)]
    modulus: Option<String>,
}

/// Errors that carry their own exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code, _)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::BoundViolated { .. }) => EXIT_BOUND,
        Some(Error::Io(_) | Error::Internal(_)) | None => 1,
        Some(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Retarget(a) => cmd_retarget(a),
        Command::Minpoly(a) => cmd_minpoly(a),
        Command::Instantiate(a) => cmd_instantiate(a),
        Command::Bound(a) => cmd_bound(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn parse_modulus(text: &str) -> anyhow::Result<BinPoly> {
    text.parse::<BinPoly>()
        .map_err(|e| usage(format!("bad modulus {text:?}: {e}")))
}

fn field(modulus: BinPoly) -> anyhow::Result<FieldCtx> {
    FieldCtx::new(modulus).map_err(|e| usage(format!("modulus {modulus:#x}: {e}")))
}

fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_search(a: SearchArgs) -> anyhow::Result<u8> {
    let modulus = parse_modulus(&a.modulus)?;
    let degree = modulus.degree();
    if degree < 1 {
        return Err(usage(format!("modulus {modulus:#x} has degree below 1")));
    }
    if !check_bound(a.ell, degree as u32) {
        eprintln!(
            "bound violated: 2*{} > 2^{degree}, no {0}x{0} MDS matrix exists over GF(2^{degree})",
            a.ell
        );
        return Ok(EXIT_BOUND);
    }
    let ctx = field(modulus)?;
    let mode: SearchMode = a.mode.parse().map_err(|e: Error| usage(e.to_string()))?;
    let mut spec = SearchSpec::new(a.ell, modulus, mode).map_err(|e| usage(e.to_string()))?;
    if let Some(m) = &a.middle_reps {
        let reps = if m == "auto" {
            middle_representatives(&ctx)
        } else {
            parse_coeff_list(m, &ctx)?.coeffs().to_vec()
        };
        spec = spec
            .with_middle_reps(reps)
            .map_err(|e| usage(e.to_string()))?;
    }
    if let Some(p) = &a.partition {
        let (i, n) = p
            .split_once('/')
            .and_then(|(i, n)| Some((i.parse().ok()?, n.parse().ok()?)))
            .ok_or_else(|| usage(format!("partition must look like i/n, got {p:?}")))?;
        spec = spec
            .with_partition(i, n)
            .map_err(|e| usage(e.to_string()))?;
    }

    let resume = match &a.resume {
        Some(path) => Some(
            Checkpoint::from_text(
                &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            )
            .map_err(|e| usage(e.to_string()))?,
        ),
        None => None,
    };
    let checkpoint_path = a
        .checkpoint
        .clone()
        .or_else(|| a.resume.clone())
        .unwrap_or_else(|| match &a.out {
            Some(o) => PathBuf::from(format!("{}.checkpoint", o.display())),
            None => PathBuf::from("recmds-search.checkpoint"),
        });

    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = stop.clone();
        ctrlc::set_handler(move || stop.store(true, Ordering::Relaxed))
            .context("installing the interrupt handler")?;
    }
    let total = recmds::candidate_count(&spec);
    eprintln!(
        "searching ell={} over GF(2^{}) mod {modulus:#x}, {mode} mode, {total} candidates in the whole space",
        spec.ell,
        ctx.degree()
    );
    let mut save_error = None;
    let result = {
        let save_error = &mut save_error;
        let path = checkpoint_path.clone();
        let on_checkpoint = move |cp: &Checkpoint| {
            if let Err(e) = save_checkpoint(&path, cp) {
                save_error.get_or_insert(e);
            }
            eprintln!(
                "checkpoint: next index {}, {} solutions so far",
                cp.next_index,
                cp.solutions.len()
            );
        };
        let opts = SearchOptions {
            workers: a.workers,
            resume,
            stop: Some(stop.clone()),
            on_checkpoint: Some(Box::new(on_checkpoint)),
        };
        run_search_with(&spec, opts)?
    };
    if let Some(e) = save_error {
        return Err(e);
    }

    let mut records: Vec<Record> = result
        .solutions
        .iter()
        .map(|cv| Record::Solution(SolutionRecord::new(cv, &ctx)))
        .collect();
    records.push(Record::Summary(SummaryRecord::new(&spec, &result)));
    let mut out = open_out(&a.out)?;
    write_records(&mut out, &records)?;
    out.flush()?;
    eprintln!(
        "{} solutions in {} classes ({} symmetric), {} candidates tested in {:.2?}",
        result.solutions.len(),
        result.classes.len(),
        result.classes.iter().filter(|c| c.symmetric).count(),
        result.candidates_tested,
        result.elapsed
    );
    if !result.complete {
        save_checkpoint(
            &checkpoint_path,
            &Checkpoint {
                next_index: result.next_index,
                spec_hash: spec.hash(),
                solutions: result.solutions.clone(),
            },
        )?;
        eprintln!(
            "interrupted; resume with --resume {}",
            checkpoint_path.display()
        );
        return Ok(EXIT_INTERRUPTED);
    }
    Ok(0)
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, cp.to_text()).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

impl OperatorArgs {
    fn given(&self) -> bool {
        self.rows.is_some() || self.shift_spec.is_some()
    }

    fn operator(&self) -> anyhow::Result<BinMatrix> {
        match (&self.rows, &self.shift_spec) {
            (Some(rows), None) => {
                let rows = rows
                    .split(',')
                    .map(|r| {
                        let p: BinPoly = r
                            .trim()
                            .parse()
                            .map_err(|e| usage(format!("bad operator row {r:?}: {e}")))?;
                        Ok(p.bits() as u128)
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let s = rows.len();
                if rows.iter().any(|&r| s < 128 && r >> s != 0) {
                    return Err(usage(format!(
                        "operator is not square: {s} rows but a row wider than {s} bits"
                    )));
                }
                BinMatrix::from_rows(rows).map_err(|e| usage(e.to_string()))
            }
            (None, Some(text)) => {
                let bits = self
                    .bits
                    .ok_or_else(|| usage("--shift-spec needs --bits"))?;
                let spec: ShiftSpec = text.parse().map_err(|e: Error| usage(e.to_string()))?;
                shift_rotate_op(bits, &spec.0).map_err(|e| usage(e.to_string()))
            }
            (Some(_), Some(_)) => Err(usage("give either --L or --shift-spec, not both")),
            (None, None) => Err(usage(
                "an operator is required: --L rows or --shift-spec with --bits",
            )),
        }
    }
}

/// Solutions to check, each with the modulus its coefficients live in (if known).
struct Loaded {
    coeffs: Vec<BinPoly>,
    modulus: Option<BinPoly>,
    label: String,
}

fn load_solutions(
    solution: &str,
    modulus: Option<BinPoly>,
    min_l: Option<BinPoly>,
) -> anyhow::Result<Vec<Loaded>> {
    let path = Path::new(solution);
    if path.is_file() {
        let records =
            read_records(BufReader::new(File::open(path)?)).map_err(|e| usage(e.to_string()))?;
        let loaded: Vec<Loaded> = records
            .into_iter()
            .filter_map(|r| match r {
                Record::Solution(s) => Some(s),
                Record::Summary(_) => None,
            })
            .enumerate()
            .map(|(i, s)| {
                let cv = s.coeff_vec().map_err(|e| usage(e.to_string()))?;
                Ok(Loaded {
                    coeffs: cv.coeffs().iter().map(|c| c.as_poly()).collect(),
                    modulus: Some(modulus.unwrap_or(s.modulus)),
                    label: format!("record {}", i + 1),
                })
            })
            .collect::<anyhow::Result<_>>()?;
        if loaded.is_empty() {
            bail!(usage(format!(
                "{} holds no solution records",
                path.display()
            )));
        }
        return Ok(loaded);
    }
    if !solution.trim_start().starts_with('[') && !solution.contains(',') {
        return Err(usage(format!(
            "{solution:?} is neither a file nor a coefficient list"
        )));
    }
    // tokens like L^-3 need a field: the given modulus, or an irreducible Min_L
    let token_field = match modulus {
        Some(m) => Some(field(m)?),
        None => match min_l {
            Some(p) if p.degree() <= 16 && p.is_irreducible()? => Some(field(p)?),
            _ => None,
        },
    };
    let coeffs = match &token_field {
        Some(ctx) => parse_coeff_list(solution, ctx)
            .map_err(|e| usage(e.to_string()))?
            .coeffs()
            .iter()
            .map(|c| c.as_poly())
            .collect(),
        None => solution
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BinPoly>()
                    .map_err(|e| usage(format!("coefficient {t:?}: {e}")))
            })
            .collect::<anyhow::Result<Vec<_>>>()?,
    };
    Ok(vec![Loaded {
        coeffs,
        modulus,
        label: "inline".into(),
    }])
}

/// `C^ell` over F2[X], reduced modulo `modulus`.
fn symbolic_power(coeffs: &[BinPoly], modulus: BinPoly) -> anyhow::Result<PolyMatrix> {
    if coeffs.first() != Some(&BinPoly::ONE) {
        return Err(usage("the first coefficient must be 1"));
    }
    let c = PolyMatrix::companion(coeffs).map_err(|e| usage(e.to_string()))?;
    Ok(c.pow(coeffs.len() as u64, Some(modulus))?)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<u8> {
    let modulus = a.modulus.as_deref().map(parse_modulus).transpose()?;
    let l = if a.operator.given() {
        Some(a.operator.operator()?)
    } else {
        None
    };
    let min_l = l.as_ref().map(|l| l.min_poly()).transpose()?;
    let solutions = load_solutions(&a.solution, modulus, min_l)?;
    let mut all_ok = true;
    for sol in &solutions {
        let ell = sol.coeffs.len();
        let ok = match (&l, min_l) {
            (Some(l), Some(p)) => {
                let m = symbolic_power(&sol.coeffs, p)?;
                println!("{}: ell={ell}, Min_L = {p:#x}", sol.label);
                let verdicts = branch_breakdown(&m, l)?;
                for v in &verdicts {
                    println!(
                        "  factor {:#x}^{}: {} ({} minors checked)",
                        v.factor,
                        v.multiplicity,
                        if v.report.is_mds { "MDS" } else { "not MDS" },
                        v.report.minors_checked
                    );
                    if let Some((r, c)) = &v.report.first_failure {
                        println!("    singular minor rows {r:?} cols {c:?}");
                    }
                }
                let ok = verdicts.iter().all(|v| v.report.is_mds);
                print_bit_oracle(&m, l)?;
                ok
            }
            _ => {
                let modulus = sol
                    .modulus
                    .ok_or_else(|| usage("verify needs --modulus, --L, or a record file"))?;
                let ctx = field(modulus)?;
                let cv = CoeffVec::new(sol.coeffs.iter().map(|&c| ctx.from_poly(c)).collect())?;
                if sol.coeffs.iter().any(|c| c.degree() >= ctx.degree() as i32) {
                    return Err(usage(format!(
                        "coefficients do not fit GF(2^{})",
                        ctx.degree()
                    )));
                }
                let m = cv
                    .diffusion_matrix(&ctx)
                    .map_err(|e| usage(e.to_string()))?;
                let report = is_mds(&m, &ctx);
                println!(
                    "{}: ell={ell} modulus {modulus:#x}: {} ({} minors checked)",
                    sol.label,
                    if report.is_mds { "MDS" } else { "not MDS" },
                    report.minors_checked
                );
                if let Some((r, c)) = &report.first_failure {
                    println!("  singular minor rows {r:?} cols {c:?}");
                }
                if ell * ctx.degree() as usize <= ORACLE_BITS {
                    println!(
                        "  branch number {} (maximal {})",
                        branch_number_oracle(&m, &ctx)?,
                        ell + 1
                    );
                } else {
                    println!("  branch number oracle skipped: guard exceeded ({ell}*{} bits > {ORACLE_BITS})", ctx.degree());
                }
                report.is_mds
            }
        };
        all_ok &= ok;
    }
    Ok(if all_ok { 0 } else { EXIT_NOT_MDS })
}

fn print_bit_oracle(m: &PolyMatrix, l: &BinMatrix) -> anyhow::Result<()> {
    let (ell, s) = (m.size(), l.dim());
    if ell * s <= ORACLE_BITS {
        let b = instantiate(m, l)?;
        println!(
            "  branch number {} (maximal {})",
            bit_branch_oracle(&b)?,
            ell + 1
        );
    } else {
        println!("  branch number oracle skipped: guard exceeded ({ell}*{s} bits > {ORACLE_BITS})");
    }
    Ok(())
}

fn cmd_retarget(a: RetargetArgs) -> anyhow::Result<u8> {
    let target = parse_modulus(&a.target_modulus)?;
    let target_ctx = field(target)?;
    let records = read_records(BufReader::new(
        File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?,
    ))
    .map_err(|e| usage(e.to_string()))?;
    let mut out_records = Vec::new();
    for r in records {
        let Record::Solution(rec) = r else { continue };
        let map = find_k(rec.modulus, target).map_err(|e| usage(e.to_string()))?;
        let moved = retarget_solution(&rec.coeff_vec()?, &map)?;
        let report = is_mds(&moved.diffusion_matrix(&target_ctx)?, &target_ctx);
        if !report.is_mds {
            bail!("retargeted solution {:?} fails the MDS check", moved);
        }
        out_records.push(Record::Solution(SolutionRecord::new(&moved, &target_ctx)));
    }
    eprintln!(
        "{} solutions moved to {target:#x} and re-verified",
        out_records.len()
    );
    let mut out = open_out(&a.out)?;
    write_records(&mut out, &out_records)?;
    out.flush()?;
    Ok(0)
}

fn cmd_minpoly(a: OperatorArgs) -> anyhow::Result<u8> {
    let l = a.operator()?;
    let p = l.min_poly().map_err(|e| usage(e.to_string()))?;
    println!("min_poly: {p:#x} ({p})");
    let factors = p.factorize()?;
    let listing: Vec<String> = factors
        .iter()
        .map(|(f, e)| {
            if *e == 1 {
                format!("{f:#x}")
            } else {
                format!("{f:#x}^{e}")
            }
        })
        .collect();
    println!("factors: {}", listing.join(" * "));
    println!("irreducible: {}", p.is_irreducible()?);
    Ok(0)
}

fn cmd_instantiate(a: InstantiateArgs) -> anyhow::Result<u8> {
    let modulus = a.modulus.as_deref().map(parse_modulus).transpose()?;
    let l = a.operator.operator()?;
    let p = l.min_poly()?;
    let solutions = load_solutions(&a.solution, modulus, Some(p))?;
    let [sol] = solutions.as_slice() else {
        return Err(usage("instantiate takes exactly one solution"));
    };
    let m = symbolic_power(&sol.coeffs, p)?;
    let block = instantiate(&m, &l).map_err(|e| usage(e.to_string()))?;
    let n = block.matrix().dim();
    println!(
        "block matrix: {0}x{0} bits ({1}x{1} blocks of {2}x{2})",
        n,
        block.ell(),
        block.s()
    );
    if let Some(path) = &a.out {
        let text: String = block
            .matrix()
            .rows()
            .iter()
            .map(|r| format!("{r:#x}\n"))
            .collect();
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if a.emit_xor_program {
        for line in block.xor_program() {
            println!("{line}");
        }
    }
    print_bit_oracle(&m, &l)?;
    Ok(0)
}

fn cmd_bound(a: BoundArgs) -> anyhow::Result<u8> {
    let degree = match (a.degree, &a.modulus) {
        (Some(d), _) => d,
        (None, Some(m)) => {
            let d = parse_modulus(m)?.degree();
            u32::try_from(d).map_err(|_| usage("modulus must be nonzero"))?
        }
        (None, None) => return Err(anyhow!(usage("--degree or --modulus is required"))),
    };
    if check_bound(a.ell, degree) {
        println!("ok: 2*{} <= 2^{degree}", a.ell);
        Ok(0)
    } else {
        println!("violated: 2*{} > 2^{degree}", a.ell);
        Ok(EXIT_BOUND)
    }
}
