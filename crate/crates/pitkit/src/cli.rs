//! The `pitkit` command line. Exit codes: 0 zero (or probably zero), 1 nonzero, 2 error.

use crate::circuit::{
    expand_to_sparse, parse_circuit, serialize_circuit, Circuit, CircuitExpr, FactorKind, Outcome, TopSumCircuit, Verdict,
};
use crate::error::{Error, Result};
use crate::field::{pit_field, Fp};
use crate::oracle::{brute_zero_test, gen_random, schwartz_zippel, ClassTag, GenParams};
use crate::pit_black::{hitting_set_spsp, hitting_set_spsu, pit_jacobian, verify_hitting_set};
use crate::pit_white::{
    didi_pit_traced, hitting_set_product_sparse, pit_powersum_white, pit_product_sparse, pit_roabp, pit_sparse_ks,
    pit_trivial, DidiOptions, HittingSet, ZeroTest,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

const TRIVIAL_GRID_CAP: u64 = 10_000_000;
const SZ_TRIALS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "pitkit", version, about = "Deterministic identity testing for depth-4 circuits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide whether a circuit file computes the zero polynomial.
    Test {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        algo: Algo,
        /// Reinterpret the circuit over this prime field.
        #[arg(long)]
        field: Option<u64>,
        /// Use the power-sum zero test inside the recursion instead of exact expansion.
        #[arg(long)]
        powersum_zero_test: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a hitting set for a circuit class.
    HittingSet {
        #[arg(long)]
        class: String,
        #[command(flatten)]
        params: HsArgs,
        #[arg(long)]
        field: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a hitting set against random nonzero members of its class.
    VerifyHs {
        #[arg(long)]
        hs: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Expected class; must match the file header.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random circuit.
    Gen {
        #[arg(long)]
        class: String,
        #[command(flatten)]
        params: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Force an identically zero instance.
        #[arg(long)]
        zero: bool,
        #[arg(long)]
        field: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the canonical sparse expansion of a circuit file.
    Expand {
        file: PathBuf,
        #[arg(long)]
        field: Option<u64>,
    },
    /// Run algorithms over seeded instances of a class and print CSV.
    Bench {
        #[arg(long)]
        class: String,
        #[arg(long, value_delimiter = ',', default_value = "auto,brute")]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[command(flatten)]
        params: GenArgs,
        /// Every other instance is a forced zero.
        #[arg(long)]
        mix_zeros: bool,
        #[arg(long)]
        field: Option<u64>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct HsArgs {
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    delta: u32,
    #[arg(long, default_value_t = 4)]
    s: u32,
}

#[derive(Args, Debug, Clone, Copy)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    delta: u32,
    #[arg(long, default_value_t = 2)]
    factors: u32,
    #[arg(long, default_value_t = 3)]
    sparsity: u32,
}

impl From<GenArgs> for GenParams {
    fn from(a: GenArgs) -> Self {
        GenParams { n: a.n, d: a.d, k: a.k, delta: a.delta, factors: a.factors, sparsity: a.sparsity }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Didi,
    Jacobian,
    SparseKs,
    Roabp,
    Powersum,
    Trivial,
    Sz,
    Brute,
    Auto,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Didi => "didi",
            Algo::Jacobian => "jacobian",
            Algo::SparseKs => "sparse-ks",
            Algo::Roabp => "roabp",
            Algo::Powersum => "powersum",
            Algo::Trivial => "trivial",
            Algo::Sz => "sz",
            Algo::Brute => "brute",
            Algo::Auto => "auto",
        }
    }
}

pub fn default_field() -> Result<Fp> {
    pit_field(1 << 20, 12)
}

fn field_or_default(p: Option<u64>) -> Result<Fp> {
    p.map_or_else(default_field, Fp::with_modulus)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Unsupported(format!("{}: {e}", path.display())))
}

fn load(path: &Path, field: Option<u64>) -> Result<Circuit> {
    let src = read(path)?;
    match field {
        Some(p) => crate::circuit::text::parse_circuit_in(&src, Some(Fp::with_modulus(p)?)),
        None => parse_circuit(&src),
    }
}

fn write_out(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Unsupported(e.to_string());
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

pub struct AlgoRun {
    pub algo: Algo,
    pub verdict: Verdict,
    pub details: Vec<String>,
    pub points: Option<u64>,
}

fn topsum(c: &Circuit) -> Option<TopSumCircuit> {
    match &c.expr {
        CircuitExpr::TopSum(t) => Some(t.clone()),
        CircuitExpr::Product(p) => Some(TopSumCircuit { terms: vec![p.clone()] }),
        _ => None,
    }
}

fn resolve(c: &Circuit) -> Result<Algo> {
    Ok(match &c.expr {
        CircuitExpr::TopSum(t) => match t.kind()? {
            FactorKind::SumUni => Algo::Didi,
            FactorKind::Sparse => Algo::Jacobian,
        },
        CircuitExpr::Product(_) => Algo::Auto,
        CircuitExpr::PowerSum(_) => Algo::Powersum,
        CircuitExpr::Roabp(_) => Algo::Roabp,
        CircuitExpr::SumUni(_) | CircuitExpr::Sparse(_) => Algo::SparseKs,
    })
}

fn mismatch(algo: Algo, c: &Circuit) -> Error {
    Error::ClassMismatch(format!("algorithm `{}` does not apply to a {} circuit", algo.name(), c.expr.class_name()))
}

/// Runs one algorithm on a circuit.
pub fn run_algo(c: &Circuit, algo: Algo, zero_test: ZeroTest, seed: u64) -> Result<AlgoRun> {
    let f = c.field;
    let algo = if algo == Algo::Auto { resolve(c)? } else { algo };
    let mut details = vec![];
    let mut points = None;
    let verdict = match algo {
        Algo::Auto => match &c.expr {
            CircuitExpr::Product(p) => pit_product_sparse(f, p)?,
            _ => unreachable!(),
        },
        Algo::Didi => {
            let t = topsum(c).ok_or_else(|| mismatch(algo, c))?;
            if t.kind()? != FactorKind::SumUni {
                return Err(mismatch(algo, c));
            }
            let (v, trace) = didi_pit_traced(f, &t, DidiOptions { zero_test, ..Default::default() })?;
            details.extend(trace.to_string().lines().map(String::from));
            v
        }
        Algo::Jacobian => {
            let t = topsum(c).ok_or_else(|| mismatch(algo, c))?;
            let (v, rep) = pit_jacobian(f, &t)?;
            details.push(format!("rank {} basis {:?} columns {:?} truncation {}", rep.rank, rep.basis, rep.cols, rep.prec));
            if !rep.grid.is_empty() {
                details.push(format!("grid {:?}", rep.grid));
                points = Some(rep.grid.iter().product());
            }
            v
        }
        Algo::SparseKs => {
            let p = expand_to_sparse(c)?;
            let d = p.max_exp() + 1;
            details.push(format!("sparsity {} individual degree < {d}", p.sparsity()));
            pit_sparse_ks(&p, p.sparsity(), d)?
        }
        Algo::Roabp => match &c.expr {
            CircuitExpr::Roabp(r) => pit_roabp(f, r),
            CircuitExpr::PowerSum(ps) => pit_powersum_white(f, ps)?,
            _ => return Err(mismatch(algo, c)),
        },
        Algo::Powersum => match &c.expr {
            CircuitExpr::PowerSum(ps) => pit_powersum_white(f, ps)?,
            _ => return Err(mismatch(algo, c)),
        },
        Algo::Trivial => {
            let (n, d) = (c.num_vars(), c.degree() + 1);
            let size = (d as u64).checked_pow(n).filter(|&s| s <= TRIVIAL_GRID_CAP);
            let size = size.ok_or_else(|| Error::Unsupported(format!("grid {d}^{n} is too large")))?;
            points = Some(size);
            details.push(format!("grid {d}^{n}"));
            pit_trivial(f, n, d, &|x| c.eval(x))?
        }
        Algo::Sz => {
            details.push(format!("{SZ_TRIALS} trials, seed {seed}"));
            schwartz_zippel(c, SZ_TRIALS, seed)?
        }
        Algo::Brute => brute_zero_test(c)?,
    };
    Ok(AlgoRun { algo, verdict, details, points })
}

fn exit_for(v: &Verdict) -> i32 {
    match v.outcome {
        Outcome::Zero | Outcome::ProbablyZero => 0,
        Outcome::NonZero => 1,
    }
}

fn hs_for(class: &str, p: HsArgs, f: Fp, seed: u64) -> Result<HittingSet> {
    if p.n == 0 || p.d == 0 || p.k == 0 || p.delta == 0 {
        return Err(Error::Unsupported("n, d, k and delta must be positive".into()));
    }
    match class.parse::<ClassTag>()? {
        ClassTag::Spsp => hitting_set_spsp(f, p.n, p.d, p.k, p.delta, p.s, seed),
        ClassTag::Spsu => hitting_set_spsu(f, p.n, p.d, p.k, p.s, seed),
        ClassTag::ProdSparse => {
            let r = crate::pit_white::ProductHs { field: f, n: p.n, d: p.d, s: p.s }.r_bound();
            if p.d as u64 * r >= f.modulus() {
                return Err(Error::FieldTooSmall(p.d as u64 * r + 1));
            }
            Ok(hitting_set_product_sparse(f, p.n, p.d, p.s))
        }
        other => Err(Error::ClassMismatch(format!("no hitting-set construction for `{other}`"))),
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Unsupported(e.to_string());
    match cmd {
        Cmd::Test { file, algo, field, powersum_zero_test, seed } => {
            let c = load(&file, field)?;
            let zt = if powersum_zero_test { ZeroTest::PowerSum } else { ZeroTest::Exact };
            let t0 = Instant::now();
            let run = run_algo(&c, algo, zt, seed)?;
            let micros = t0.elapsed().as_micros();
            writeln!(out, "algorithm: {}", run.algo.name()).map_err(io)?;
            writeln!(out, "class: {} field: {}", c.expr.class_name(), c.field.modulus()).map_err(io)?;
            writeln!(out, "verdict: {}", run.verdict).map_err(io)?;
            for d in &run.details {
                writeln!(out, "  {d}").map_err(io)?;
            }
            writeln!(out, "time: {micros} us").map_err(io)?;
            Ok(exit_for(&run.verdict))
        }
        Cmd::HittingSet { class, params, field, seed, out: path } => {
            let f = field_or_default(field)?;
            let hs = hs_for(&class, params, f, seed)?;
            write_out(out, &path, &hs.serialize())?;
            match path {
                Some(_) => writeln!(out, "{} points", hs.len()).map_err(io)?,
                None => eprintln!("{} points", hs.len()),
            }
            Ok(0)
        }
        Cmd::VerifyHs { hs, samples, class, seed } => {
            let set = HittingSet::parse(&read(&hs)?)?;
            if let Some(c) = class {
                if c != set.class {
                    return Err(Error::ClassMismatch(format!("file holds a `{}` set, not `{c}`", set.class)));
                }
            }
            if samples == 0 {
                eprintln!("warning: no samples requested; nothing verified");
                writeln!(out, "0/0 hits").map_err(io)?;
                return Ok(0);
            }
            let rep = verify_hitting_set(&set, samples, seed)?;
            writeln!(out, "{}/{} hits over {} points", rep.hits, rep.samples, set.len()).map_err(io)?;
            for m in &rep.misses {
                writeln!(out, "  missed sample seed {m}").map_err(io)?;
            }
            Ok(if rep.misses.is_empty() { 0 } else { 1 })
        }
        Cmd::Gen { class, params, seed, zero, field, out: path } => {
            let f = field_or_default(field)?;
            let c = gen_random(f, class.parse()?, &params.into(), seed, zero)?;
            write_out(out, &path, &serialize_circuit(&c))?;
            Ok(0)
        }
        Cmd::Expand { file, field } => {
            let c = load(&file, field)?;
            writeln!(out, "{}", expand_to_sparse(&c)?).map_err(io)?;
            Ok(0)
        }
        Cmd::Bench { class, algos, seeds, first_seed, params, mix_zeros, field } => {
            let f = field_or_default(field)?;
            let tag: ClassTag = class.parse()?;
            let gp: GenParams = params.into();
            writeln!(out, "class,n,d,k,delta,seed,algo,verdict,micros,hs_size").map_err(io)?;
            for seed in first_seed..first_seed + seeds {
                let c = gen_random(f, tag, &gp, seed, mix_zeros && seed % 2 == 1)?;
                for &algo in &algos {
                    let t0 = Instant::now();
                    let (verdict, pts) = match run_algo(&c, algo, ZeroTest::Exact, seed) {
                        Ok(r) => (format!("{:?}", r.verdict.outcome).to_lowercase(), r.points),
                        Err(e) => (format!("error: {e}").replace(',', ";"), None),
                    };
                    writeln!(
                        out,
                        "{tag},{},{},{},{},{seed},{},{verdict},{},{}",
                        gp.n,
                        gp.d,
                        gp.k,
                        gp.delta,
                        algo.name(),
                        t0.elapsed().as_micros(),
                        pts.map_or(String::new(), |p| p.to_string())
                    )
                    .map_err(io)?;
                }
            }
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
