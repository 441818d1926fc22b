//! Command-line front end. Every library operation is reachable from a
//! subcommand; expansions print in the PARI style (`2 + 2*5 + ... + O(5^6)`)
//! and `--json` emits a machine-readable mirror that renders back to the
//! exact text output.

use clap::{Parser, Subcommand};
use localglobal::elliptic::{
    self, l_value, rank_estimate, torsion_subgroup, ECPoint, LMode, WeierstrassCurve,
};
use localglobal::lindioph::{self, IntMatrix};
use localglobal::modular::{self, ResidueSystem};
use localglobal::padic::{
    self, teichmuller, unit_decompose, ArithOp, IntPolynomial, PAdicNumber,
};
use localglobal::quadforms::{self, Place, SymmetricForm};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "localglobal",
    about = "Local-global arithmetic: p-adics, Diophantine systems, Hilbert symbols, elliptic curves",
    version
)]
struct Cli {
    /// Emit a JSON mirror of the text output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// p-adic numbers: expansions, arithmetic, logarithms, squares.
    Padic {
        #[command(subcommand)]
        cmd: PadicCmd,
    },
    /// Hensel lifting of a polynomial root.
    Hensel {
        /// Integer polynomial, e.g. "x^2 - 2".
        poly: String,
        /// Starting approximation (rational, usually an integer).
        alpha0: Rational,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: usize,
    },
    /// Teichmueller representative of x0 in Z_p.
    Teich {
        #[arg(allow_hyphen_values = true)]
        x0: i64,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: usize,
    },
    /// Hilbert symbol (a, b) at a place: a prime or "inf".
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: Rational,
        #[arg(allow_hyphen_values = true)]
        b: Rational,
        place: PlaceArg,
    },
    /// Quadratic forms: ternary solving, tables, conics, diagonalization.
    Qform {
        #[command(subcommand)]
        cmd: QformCmd,
    },
    /// Integer linear systems via the Smith normal form.
    Linsys {
        #[command(subcommand)]
        cmd: LinsysCmd,
    },
    /// Chinese remainder theorem on residue/modulus pairs: r1 m1 r2 m2 ...
    Crt {
        #[arg(allow_hyphen_values = true, num_args = 2..)]
        pairs: Vec<i64>,
    },
    /// Elliptic curves over Q.
    Ec {
        #[command(subcommand)]
        cmd: EcCmd,
    },
}

#[derive(Subcommand)]
enum PadicCmd {
    /// p-adic expansion of a rational, PARI style. With --primes A..B the
    /// output is one line per prime, `p=2,9/7=...`.
    Expand {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
        #[arg(short = 'p', long, conflicts_with = "primes")]
        prime: Option<u64>,
        /// Inclusive prime range, e.g. 2..163.
        #[arg(long)]
        primes: Option<PrimeRange>,
        /// Absolute precision: the expansion is printed modulo p^prec.
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: i64,
    },
    /// Arithmetic on two expansions: add, sub, mul, div, neg.
    Arith {
        op: String,
        #[arg(allow_hyphen_values = true)]
        x: Rational,
        #[arg(allow_hyphen_values = true)]
        y: Option<Rational>,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: usize,
    },
    /// Valuation and absolute value |x|_p.
    Val {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
        #[arg(short = 'p', long)]
        prime: u64,
    },
    /// Product formula over all places: prod |x|_v = 1.
    Prodcheck {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
    },
    /// p-adic logarithm of a principal unit.
    Log {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: usize,
    },
    /// Is the rational a square in Q_p? Prints a witness root if so.
    Issquare {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 8)]
        prec: usize,
    },
    /// Representatives of the square classes of Q_p^x.
    Sqclass {
        #[arg(short = 'p', long)]
        prime: u64,
    },
    /// Splitting x = p^m * teichmuller * principal unit.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        value: Rational,
        #[arg(short = 'p', long)]
        prime: u64,
        #[arg(long, env = "LOCALGLOBAL_PREC", default_value_t = 6)]
        prec: usize,
    },
}

#[derive(Subcommand)]
enum QformCmd {
    /// Solve a x^2 + b y^2 = c z^2 in coprime integers (Legendre descent).
    Solve {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        #[arg(allow_hyphen_values = true)]
        c: i64,
    },
    /// Reduce a x^2 + b y^2 - c z^2 to squarefree pairwise-coprime shape.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        #[arg(allow_hyphen_values = true)]
        c: i64,
    },
    /// Does a x^2 + b y^2 - c z^2 represent zero over Q? Per-place report.
    Zero {
        #[arg(allow_hyphen_values = true)]
        a: Rational,
        #[arg(allow_hyphen_values = true)]
        b: Rational,
        #[arg(allow_hyphen_values = true)]
        c: Rational,
    },
    /// Hilbert-symbol table over the square classes at p.
    Table {
        #[arg(short = 'p')]
        prime: u64,
    },
    /// Second intersection of a line with a conic. The form is the upper
    /// triangle f00,f01,f02,f11,f12,f22; points are x:y:z.
    Conic {
        form: String,
        x0: String,
        y0: String,
    },
    /// Primitive Pythagorean triple from parameters u > v.
    Pyth { u: i64, v: i64 },
    /// Lagrange diagonalization of the symmetric matrix in FILE
    /// (first line n, then n rows).
    Diag { file: String },
}

#[derive(Subcommand)]
enum LinsysCmd {
    /// Solve A x = b over Z. FILE: first line "m n", then A, then b.
    Solve { file: String },
    /// Smith normal form U A V = D. FILE: first line "m n", then A.
    Snf { file: String },
    /// Congruence solvability of A x = b mod each modulus.
    Moduli {
        file: String,
        #[arg(long, value_delimiter = ',')]
        moduli: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum EcCmd {
    /// Store a curve [a1,a2,a3,a4,a6] for the following ec calls.
    Init { curve: String },
    /// Discriminant of the stored (or given) curve.
    Disc {
        #[arg(long)]
        curve: Option<String>,
    },
    /// Point count of the reduction mod p.
    Count {
        p: u64,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Dirichlet coefficients a_p for p up to pmax.
    Ap {
        pmax: u64,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Rational torsion subgroup (Nagell-Lutz + Mazur).
    Torsion {
        #[arg(long)]
        curve: Option<String>,
    },
    /// L(E, s) by Euler product or the analytic series.
    Lvalue {
        s: f64,
        #[arg(long, default_value = "analytic")]
        mode: String,
        /// Euler-product prime cut.
        #[arg(long, default_value_t = 10_000)]
        cut: u64,
        /// Analytic term count (defaults to the tail-bound rule).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        conductor: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        root_number: Option<i32>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Numerical rank estimate from the L-series.
    Rank {
        #[arg(long, default_value_t = 1.0001)]
        s: f64,
        #[arg(long)]
        conductor: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        root_number: Option<i32>,
        #[arg(long)]
        curve: Option<String>,
    },
}

/// Rational CLI argument `num` or `num/den`.
#[derive(Debug, Clone, Copy)]
struct Rational {
    num: i64,
    den: i64,
}

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (n, d) = match s.split_once('/') {
            None => (s, "1"),
            Some((n, d)) => (n, d),
        };
        let num = n.parse().map_err(|_| format!("bad numerator `{}`", n))?;
        let den = d.parse().map_err(|_| format!("bad denominator `{}`", d))?;
        if den == 0 {
            return Err("denominator is zero".into());
        }
        Ok(Rational { num, den })
    }
}

impl Rational {
    fn to_big(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    fn display(&self) -> String {
        if self.den == 1 {
            format!("{}", self.num)
        } else {
            format!("{}/{}", self.num, self.den)
        }
    }
}

/// Inclusive prime range `A..B`.
#[derive(Debug, Clone, Copy)]
struct PrimeRange {
    lo: u64,
    hi: u64,
}

impl FromStr for PrimeRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or("expected A..B")?;
        Ok(PrimeRange {
            lo: lo.parse().map_err(|_| "bad range start")?,
            hi: hi.parse().map_err(|_| "bad range end")?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum PlaceArg {
    Finite(u64),
    Infinite,
}

impl FromStr for PlaceArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "inf" || s == "oo" || s == "infinity" {
            return Ok(PlaceArg::Infinite);
        }
        let p: u64 = s.parse().map_err(|_| "place must be a prime or `inf`")?;
        Ok(PlaceArg::Finite(p))
    }
}

impl From<PlaceArg> for Place {
    fn from(p: PlaceArg) -> Place {
        match p {
            PlaceArg::Finite(p) => Place::Finite(p),
            PlaceArg::Infinite => Place::Infinite,
        }
    }
}

/// Domain-level failure: library error name plus message, exit code 1.
struct CliError {
    name: String,
    message: String,
}

impl CliError {
    fn new(name: &str, message: impl std::fmt::Display) -> Self {
        CliError {
            name: name.into(),
            message: message.to_string(),
        }
    }
}

macro_rules! impl_from_error {
    ($ty:ty) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new(e.name(), &e)
            }
        }
    };
}

impl_from_error!(modular::ModularError);
impl_from_error!(padic::PAdicError);
impl_from_error!(lindioph::LinDiophError);
impl_from_error!(quadforms::QuadFormError);
impl_from_error!(elliptic::EllipticError);

fn require_prime(p: u64) -> Result<u64, CliError> {
    if modular::is_prime(p) {
        Ok(p)
    } else {
        Err(CliError::new("NotPrime", format!("{} is not prime", p)))
    }
}

/// Ten significant digits, plain notation for moderate magnitudes.
fn fmt_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        let decimals = (9 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.9e}", x)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(value) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!("{}", render(&value));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {}", e.name, e.message);
            ExitCode::FAILURE
        }
    }
}

/// Renders the JSON mirror back to the text output; the text path always
/// goes through here, so `--json` and text stay in lockstep.
fn render(v: &Value) -> String {
    match v.get("lines") {
        Some(Value::Array(lines)) => lines
            .iter()
            .map(|l| l.as_str().unwrap_or_default().to_string())
            .collect::<Vec<_>>()
            .join("\n"),
        _ => v
            .get("text")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string(),
    }
}

fn lines_value(kind: &str, lines: Vec<String>, data: Value) -> Value {
    json!({ "kind": kind, "lines": lines, "data": data })
}

fn text_value(kind: &str, text: String, data: Value) -> Value {
    json!({ "kind": kind, "text": text, "data": data })
}

fn run(cmd: Command) -> Result<Value, CliError> {
    match cmd {
        Command::Padic { cmd } => run_padic(cmd),
        Command::Hensel {
            poly,
            alpha0,
            prime,
            prec,
        } => {
            let prime = require_prime(prime)?;
            let f: IntPolynomial = poly
                .parse()
                .map_err(|e| CliError::new("BadPolynomial", e))?;
            let a0 = PAdicNumber::from_rational(alpha0.num, alpha0.den, prime, prec.max(4))?;
            let root = padic::hensel_lift(&f, &a0, prec)?;
            let text = root.to_string();
            Ok(text_value(
                "hensel",
                text.clone(),
                json!({
                    "poly": f.to_string(),
                    "p": prime,
                    "root": text,
                    "digits": root.digits(),
                    "valuation": root.valuation(),
                }),
            ))
        }
        Command::Teich { x0, prime, prec } => {
            let prime = require_prime(prime)?;
            let w = teichmuller(x0, prime, prec);
            let text = w.to_string();
            Ok(text_value(
                "teich",
                text.clone(),
                json!({ "x0": x0, "p": prime, "value": text, "digits": w.digits() }),
            ))
        }
        Command::Hilbert { a, b, place } => {
            if let PlaceArg::Finite(p) = place {
                require_prime(p)?;
            }
            let s = quadforms::hilbert_symbol(&a.to_big(), &b.to_big(), place.into())?;
            let text = if s > 0 { "+1" } else { "-1" }.to_string();
            Ok(text_value(
                "hilbert",
                text.clone(),
                json!({
                    "a": a.display(),
                    "b": b.display(),
                    "place": match place { PlaceArg::Finite(p) => json!(p), PlaceArg::Infinite => json!("inf") },
                    "symbol": s,
                }),
            ))
        }
        Command::Qform { cmd } => run_qform(cmd),
        Command::Linsys { cmd } => run_linsys(cmd),
        Command::Crt { pairs } => {
            if pairs.len() % 2 != 0 {
                return Err(CliError::new(
                    "BadArguments",
                    "expected residue/modulus pairs",
                ));
            }
            let mut sys = Vec::new();
            for chunk in pairs.chunks(2) {
                if chunk[1] <= 0 {
                    return Err(CliError::new("BadArguments", "moduli must be positive"));
                }
                sys.push((chunk[0], chunk[1] as u64));
            }
            let system = ResidueSystem::new(&sys);
            let (a, n) = modular::crt(&system)?;
            let text = format!("{} mod {}", a, n);
            Ok(text_value(
                "crt",
                text.clone(),
                json!({ "residue": a, "modulus": n, "pairs": sys }),
            ))
        }
        Command::Ec { cmd } => run_ec(cmd),
    }
}

fn run_padic(cmd: PadicCmd) -> Result<Value, CliError> {
    match cmd {
        PadicCmd::Expand {
            value,
            prime,
            primes,
            prec,
        } => match (prime, primes) {
            (Some(p), None) => {
                let p = require_prime(p)?;
                let x = PAdicNumber::from_rational_abs(value.num, value.den, p, prec)?;
                let text = x.to_string();
                Ok(text_value(
                    "padic-expand",
                    text.clone(),
                    json!({
                        "value": value.display(), "p": p, "prec": prec,
                        "expansion": text,
                        "valuation": x.valuation(), "digits": x.digits(),
                    }),
                ))
            }
            (None, Some(range)) => {
                let mut lines = Vec::new();
                let mut entries = Vec::new();
                for p in modular::primes_in(range.lo, range.hi) {
                    let x = PAdicNumber::from_rational_abs(value.num, value.den, p, prec)?;
                    let exp = x.to_string();
                    lines.push(format!("p={},{}={}", p, value.display(), exp));
                    entries.push(json!({ "p": p, "expansion": exp }));
                }
                Ok(lines_value(
                    "padic-expand-range",
                    lines,
                    json!({ "value": value.display(), "prec": prec, "entries": entries }),
                ))
            }
            (None, None) => Err(CliError::new(
                "BadArguments",
                "pass -p PRIME or --primes A..B",
            )),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        },
        PadicCmd::Arith {
            op,
            x,
            y,
            prime,
            prec,
        } => {
            let prime = require_prime(prime)?;
            let op: ArithOp = op.parse().map_err(|e| CliError::new("BadArguments", e))?;
            let xv = PAdicNumber::from_rational(x.num, x.den, prime, prec)?;
            let yv = match y {
                Some(y) => PAdicNumber::from_rational(y.num, y.den, prime, prec)?,
                None => {
                    if op != ArithOp::Neg {
                        return Err(CliError::new("BadArguments", "binary op needs two values"));
                    }
                    xv.clone()
                }
            };
            let r = padic::arith(op, &xv, &yv)?;
            let text = r.to_string();
            Ok(text_value(
                "padic-arith",
                text.clone(),
                json!({ "op": format!("{:?}", op).to_lowercase(), "p": prime, "result": text }),
            ))
        }
        PadicCmd::Val { value, prime } => {
            let prime = require_prime(prime)?;
            let (ord, abs) = padic::valuation_abs(value.num, value.den, prime)?;
            let text = match ord {
                Some(m) => format!("ord={} |x|_{}={}", m, prime, abs),
                None => format!("ord=oo |x|_{}=0", prime),
            };
            Ok(text_value(
                "padic-val",
                text.clone(),
                json!({ "value": value.display(), "p": prime, "ord": ord, "abs": abs.to_string() }),
            ))
        }
        PadicCmd::Prodcheck { value } => {
            let check = padic::valuation_product_check(value.num, value.den)?;
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for pl in &check.places {
                let name = match pl.prime {
                    Some(p) => p.to_string(),
                    None => "inf".to_string(),
                };
                lines.push(format!("|x|_{} = {}", name, pl.abs));
                entries.push(json!({ "place": name, "abs": pl.abs.to_string() }));
            }
            lines.push(format!("product = {}", check.product));
            Ok(lines_value(
                "padic-prodcheck",
                lines,
                json!({ "value": value.display(), "places": entries, "product": check.product.to_string() }),
            ))
        }
        PadicCmd::Log { value, prime, prec } => {
            let prime = require_prime(prime)?;
            let u = PAdicNumber::from_rational(value.num, value.den, prime, prec + 2)?;
            let l = padic::padic_log(&u, prec)?;
            let text = l.to_string();
            Ok(text_value(
                "padic-log",
                text.clone(),
                json!({ "value": value.display(), "p": prime, "log": text }),
            ))
        }
        PadicCmd::Issquare { value, prime, prec } => {
            let prime = require_prime(prime)?;
            let witness = padic::rational_is_square_at(value.num, value.den, prime, prec)?;
            let (text, data) = match witness {
                Some(w) => {
                    let ws = w.to_string();
                    (
                        format!("true, witness {}", ws),
                        json!({ "square": true, "witness": ws }),
                    )
                }
                None => ("false".to_string(), json!({ "square": false })),
            };
            Ok(text_value(
                "padic-issquare",
                text,
                json!({ "value": value.display(), "p": prime, "result": data }),
            ))
        }
        PadicCmd::Sqclass { prime } => {
            let prime = require_prime(prime)?;
            let reps = padic::square_class_reps(prime);
            let text = reps
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            Ok(text_value(
                "padic-sqclass",
                text,
                json!({ "p": prime, "representatives": reps }),
            ))
        }
        PadicCmd::Decompose { value, prime, prec } => {
            let prime = require_prime(prime)?;
            let x = PAdicNumber::from_rational(value.num, value.den, prime, prec)?;
            let d = unit_decompose(&x)?;
            let lines = vec![
                format!("exponent  {}", d.exponent),
                format!("teich     {}", d.teich),
                format!("principal {}", d.principal),
            ];
            Ok(lines_value(
                "padic-decompose",
                lines,
                json!({
                    "value": value.display(), "p": prime, "nu": d.nu,
                    "exponent": d.exponent,
                    "teich": d.teich.to_string(),
                    "principal": d.principal.to_string(),
                }),
            ))
        }
    }
}

fn run_qform(cmd: QformCmd) -> Result<Value, CliError> {
    match cmd {
        QformCmd::Solve { a, b, c } => {
            let form = quadforms::legendre_reduce(a, b, c)?;
            let (ra, rb, rc) = form.coefficients();
            let sol = quadforms::legendre_solve(&form)?;
            let (x, y, z) = form.transport(&sol);
            let lines = vec![
                format!(
                    "reduced form {}x^2 + {}y^2 = {}z^2: ({}, {}, {})",
                    ra, rb, rc, sol.0, sol.1, sol.2
                ),
                format!(
                    "original form {}x^2 + {}y^2 = {}z^2: ({}, {}, {})",
                    a, b, c, x, y, z
                ),
            ];
            Ok(lines_value(
                "qform-solve",
                lines,
                json!({
                    "input": [a, b, c],
                    "reduced": [ra, rb, rc],
                    "reduced_solution": [sol.0, sol.1, sol.2],
                    "solution": [x.to_string(), y.to_string(), z.to_string()],
                }),
            ))
        }
        QformCmd::Reduce { a, b, c } => {
            let form = quadforms::legendre_reduce(a, b, c)?;
            let (ra, rb, rc) = form.coefficients();
            let text = format!(
                "{}x^2 + {}y^2 - {}z^2  ({} steps)",
                ra,
                rb,
                rc,
                form.trace().len()
            );
            Ok(text_value(
                "qform-reduce",
                text,
                json!({
                    "input": [a, b, c],
                    "reduced": [ra, rb, rc],
                    "steps": form.trace().iter().map(|s| format!("{:?}", s)).collect::<Vec<_>>(),
                }),
            ))
        }
        QformCmd::Zero { a, b, c } => {
            let verdict =
                quadforms::ternary_represents_zero(&a.to_big(), &b.to_big(), &c.to_big())?;
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for pv in &verdict.per_place {
                lines.push(format!(
                    "place {}: {}",
                    pv.place,
                    if pv.symbol > 0 { "+1" } else { "-1" }
                ));
                entries.push(json!({ "place": pv.place.to_string(), "symbol": pv.symbol }));
            }
            lines.push(format!(
                "represents zero over Q: {}",
                verdict.represents_zero
            ));
            Ok(lines_value(
                "qform-zero",
                lines,
                json!({ "represents_zero": verdict.represents_zero, "places": entries }),
            ))
        }
        QformCmd::Table { prime } => {
            let prime = require_prime(prime)?;
            let classes = padic::square_class_reps(prime);
            let mut lines = Vec::new();
            lines.push(
                std::iter::once("b\\a".to_string())
                    .chain(classes.iter().map(|c| c.to_string()))
                    .map(|h| format!("{:>6}", h))
                    .collect::<String>(),
            );
            let mut matrix = Vec::new();
            for &b in &classes {
                let mut row = vec![format!("{:>6}", b)];
                let mut jrow = Vec::new();
                for &a in &classes {
                    let s = quadforms::hilbert_symbol_int(a, b, Place::Finite(prime))?;
                    row.push(format!("{:>6}", if s > 0 { "+1" } else { "-1" }));
                    jrow.push(s);
                }
                lines.push(row.concat());
                matrix.push(jrow);
            }
            Ok(lines_value(
                "qform-table",
                lines,
                json!({ "p": prime, "classes": classes, "table": matrix }),
            ))
        }
        QformCmd::Conic { form, x0, y0 } => {
            let entries: Vec<Rational> = form
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e: String| CliError::new("BadArguments", e))?;
            if entries.len() != 6 {
                return Err(CliError::new(
                    "BadArguments",
                    "form needs 6 entries f00,f01,f02,f11,f12,f22",
                ));
            }
            let e: Vec<BigRational> = entries.iter().map(|r| r.to_big()).collect();
            let mat = vec![
                vec![e[0].clone(), e[1].clone(), e[2].clone()],
                vec![e[1].clone(), e[3].clone(), e[4].clone()],
                vec![e[2].clone(), e[4].clone(), e[5].clone()],
            ];
            let form = SymmetricForm::from_matrix(mat)?;
            let parse_pt = |s: &str| -> Result<[BigRational; 3], CliError> {
                let c: Vec<Rational> = s
                    .split(':')
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|e: String| CliError::new("BadArguments", e))?;
                if c.len() != 3 {
                    return Err(CliError::new("BadArguments", "point needs x:y:z"));
                }
                Ok([c[0].to_big(), c[1].to_big(), c[2].to_big()])
            };
            let p0 = parse_pt(&x0)?;
            let p1 = parse_pt(&y0)?;
            let pt = quadforms::conic_second_intersection(&form, &p0, &p1)?;
            let text = format!("({} : {} : {})", pt[0], pt[1], pt[2]);
            Ok(text_value(
                "qform-conic",
                text,
                json!({ "point": pt.iter().map(|c| c.to_string()).collect::<Vec<_>>() }),
            ))
        }
        QformCmd::Pyth { u, v } => {
            let (x, y, z) = quadforms::pythagorean_triple(u, v)?;
            let text = format!("({}, {}, {})", x, y, z);
            Ok(text_value(
                "qform-pyth",
                text,
                json!({ "u": u, "v": v, "triple": [x, y, z] }),
            ))
        }
        QformCmd::Diag { file } => {
            let textin = std::fs::read_to_string(&file)
                .map_err(|e| CliError::new("Io", format!("{}: {}", file, e)))?;
            let mut toks = textin.split_whitespace();
            let n: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| CliError::new("BadArguments", "first token must be n"))?;
            let mut mat = vec![vec![BigRational::default(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let tok = toks
                        .next()
                        .ok_or_else(|| CliError::new("BadArguments", "missing matrix entry"))?;
                    let r: Rational = tok
                        .parse()
                        .map_err(|e: String| CliError::new("BadArguments", e))?;
                    mat[i][j] = r.to_big();
                }
            }
            let form = SymmetricForm::from_matrix(mat)?;
            let (c, d) = quadforms::lagrange_diagonalize(&form);
            let mut lines = vec![format!(
                "D = diag({})",
                d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            )];
            for row in &c {
                lines.push(
                    row.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                );
            }
            Ok(lines_value(
                "qform-diag",
                lines,
                json!({
                    "diagonal": d.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "change_of_basis": c
                        .iter()
                        .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }),
            ))
        }
    }
}

fn read_matrix(file: &str) -> Result<(IntMatrix, Option<Vec<BigInt>>), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::new("Io", format!("{}: {}", file, e)))?;
    lindioph::parse_matrix_file(&text).map_err(|e| CliError::new("BadMatrixFile", e))
}

fn run_linsys(cmd: LinsysCmd) -> Result<Value, CliError> {
    match cmd {
        LinsysCmd::Solve { file } => {
            let (a, b) = read_matrix(&file)?;
            let b = b.ok_or_else(|| {
                CliError::new("BadMatrixFile", "missing right-hand side after the matrix")
            })?;
            match lindioph::solve_integer_system(&a, &b)? {
                Ok(sol) => {
                    let mut lines = vec![format!(
                        "particular: ({})",
                        sol.particular
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )];
                    for h in &sol.lattice_basis {
                        lines.push(format!(
                            "lattice:    ({})",
                            h.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                        ));
                    }
                    Ok(lines_value(
                        "linsys-solve",
                        lines,
                        json!({
                            "solvable": true,
                            "particular": sol.particular.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                            "lattice_basis": sol.lattice_basis.iter()
                                .map(|h| h.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                                .collect::<Vec<_>>(),
                        }),
                    ))
                }
                Err(w) => {
                    let reason = match &w.divisor {
                        Some(d) => format!(
                            "d_{} = {} does not divide c_{} = {}",
                            w.index + 1,
                            d,
                            w.index + 1,
                            w.target
                        ),
                        None => format!("c_{} = {} beyond the rank", w.index + 1, w.target),
                    };
                    let text = format!("unsolvable: {}", reason);
                    Ok(text_value(
                        "linsys-solve",
                        text,
                        json!({ "solvable": false, "index": w.index, "reason": reason }),
                    ))
                }
            }
        }
        LinsysCmd::Snf { file } => {
            let (a, _) = read_matrix(&file)?;
            let snf = lindioph::smith_normal_form(&a);
            let mut lines = vec![
                format!(
                    "divisors: {}",
                    snf.divisors
                        .iter()
                        .map(|d| d.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                format!("rank: {}", snf.rank),
            ];
            for (name, m) in [("U", &snf.u), ("D", &snf.d), ("V", &snf.v)] {
                lines.push(format!("{}:", name));
                for line in m.to_string().lines() {
                    lines.push(format!("  {}", line));
                }
            }
            let dump = |m: &IntMatrix| {
                (0..m.rows())
                    .map(|i| {
                        (0..m.cols())
                            .map(|j| m.at(i, j).to_string())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            };
            Ok(lines_value(
                "linsys-snf",
                lines,
                json!({
                    "rank": snf.rank,
                    "divisors": snf.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                    "u": dump(&snf.u), "d": dump(&snf.d), "v": dump(&snf.v),
                }),
            ))
        }
        LinsysCmd::Moduli { file, moduli } => {
            let (a, b) = read_matrix(&file)?;
            let b = b.ok_or_else(|| {
                CliError::new("BadMatrixFile", "missing right-hand side after the matrix")
            })?;
            let report = lindioph::solvable_all_moduli(&a, &b, &moduli)?;
            let mut lines = Vec::new();
            for (n, ok) in &report.per_modulus {
                lines.push(format!(
                    "mod {}: {}",
                    n,
                    if *ok { "solvable" } else { "unsolvable" }
                ));
            }
            lines.push(format!("integer solvable: {}", report.integer_solvable));
            if let Some(n) = &report.failing_modulus {
                lines.push(format!("fails mod {}", n));
            }
            Ok(lines_value(
                "linsys-moduli",
                lines,
                json!({
                    "per_modulus": report.per_modulus,
                    "integer_solvable": report.integer_solvable,
                    "failing_modulus": report.failing_modulus.as_ref().map(|n| n.to_string()),
                }),
            ))
        }
    }
}

fn state_path() -> std::path::PathBuf {
    std::env::var_os("LOCALGLOBAL_STATE")
        .map(Into::into)
        .unwrap_or_else(|| ".localglobal-ec.json".into())
}

fn parse_curve(spec: &str) -> Result<WeierstrassCurve, CliError> {
    let inner = spec.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<Rational> = inner
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|e: String| CliError::new("BadCurve", e))?;
    if parts.len() != 5 {
        return Err(CliError::new("BadCurve", "expected [a1,a2,a3,a4,a6]"));
    }
    Ok(WeierstrassCurve::new(
        parts[0].to_big(),
        parts[1].to_big(),
        parts[2].to_big(),
        parts[3].to_big(),
        parts[4].to_big(),
    ))
}

fn load_curve(arg: Option<String>) -> Result<WeierstrassCurve, CliError> {
    if let Some(spec) = arg {
        return parse_curve(&spec);
    }
    let path = state_path();
    let text = std::fs::read_to_string(&path).map_err(|_| {
        CliError::new(
            "NoCurve",
            "no curve initialized; run `ec init [a1,a2,a3,a4,a6]` or pass --curve",
        )
    })?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::new("BadState", e))?;
    let spec = v
        .get("curve")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::new("BadState", "state file lacks a curve"))?;
    parse_curve(spec)
}

fn fmt_big_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

fn fmt_point(p: &ECPoint) -> String {
    match p {
        ECPoint::Infinity => "O".to_string(),
        ECPoint::Affine(x, y) => format!("({}, {})", fmt_big_rational(x), fmt_big_rational(y)),
    }
}

fn run_ec(cmd: EcCmd) -> Result<Value, CliError> {
    match cmd {
        EcCmd::Init { curve } => {
            let e = parse_curve(&curve)?;
            let path = state_path();
            std::fs::write(&path, json!({ "curve": curve }).to_string())
                .map_err(|err| CliError::new("Io", err))?;
            let text = format!(
                "curve y^2 + {} xy + {} y = x^3 + {} x^2 + {} x + {} stored",
                fmt_big_rational(&e.a1),
                fmt_big_rational(&e.a3),
                fmt_big_rational(&e.a2),
                fmt_big_rational(&e.a4),
                fmt_big_rational(&e.a6),
            );
            Ok(text_value("ec-init", text, json!({ "curve": curve })))
        }
        EcCmd::Disc { curve } => {
            let e = load_curve(curve)?;
            let d = e.discriminant();
            let text = fmt_big_rational(&d);
            Ok(text_value(
                "ec-disc",
                text.clone(),
                json!({ "discriminant": text }),
            ))
        }
        EcCmd::Count { p, curve } => {
            let e = load_curve(curve)?;
            require_prime(p)?;
            let n = e.count_points_mod_p(p)?;
            let text = n.to_string();
            Ok(text_value("ec-count", text, json!({ "p": p, "points": n })))
        }
        EcCmd::Ap { pmax, curve } => {
            let e = load_curve(curve)?;
            let minimal = e.minimal_model();
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for p in modular::primes_in(2, pmax) {
                let ap = minimal.ap(p)?;
                let tag = match minimal.reduction_type(p)? {
                    elliptic::ReductionType::Good => String::new(),
                    t => format!("  ({})", t),
                };
                lines.push(format!("a_{} = {}{}", p, ap, tag));
                entries.push(json!({ "p": p, "ap": ap }));
            }
            Ok(lines_value(
                "ec-ap",
                lines,
                json!({ "pmax": pmax, "entries": entries }),
            ))
        }
        EcCmd::Torsion { curve } => {
            let e = load_curve(curve)?;
            let t = torsion_subgroup(&e)?;
            let mut lines = vec![format!("torsion: {} (order {})", t.structure, t.order)];
            if !t.generators.is_empty() {
                lines.push(format!(
                    "generators: {}",
                    t.generators
                        .iter()
                        .map(fmt_point)
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            if !t.points.is_empty() {
                lines.push(format!(
                    "points: {}",
                    t.points.iter().map(fmt_point).collect::<Vec<_>>().join(", ")
                ));
            }
            Ok(lines_value(
                "ec-torsion",
                lines,
                json!({
                    "structure": t.structure.to_string(),
                    "order": t.order,
                    "generators": t.generators.iter().map(fmt_point).collect::<Vec<_>>(),
                    "points": t.points.iter().map(fmt_point).collect::<Vec<_>>(),
                }),
            ))
        }
        EcCmd::Lvalue {
            s,
            mode,
            cut,
            terms,
            conductor,
            root_number,
            curve,
        } => {
            let e = load_curve(curve)?;
            let mode = match mode.as_str() {
                "euler" | "euler_product" => LMode::EulerProduct { cut },
                "analytic" => LMode::Analytic { terms },
                other => {
                    return Err(CliError::new(
                        "BadArguments",
                        format!("unknown mode `{}` (euler|analytic)", other),
                    ))
                }
            };
            let v = l_value(&e, s, mode, conductor, root_number)?;
            let text = fmt_sig10(v);
            Ok(text_value(
                "ec-lvalue",
                text.clone(),
                json!({ "s": s, "value": v, "rendered": text }),
            ))
        }
        EcCmd::Rank {
            s,
            conductor,
            root_number,
            curve,
        } => {
            let e = load_curve(curve)?;
            let r = rank_estimate(&e, s, conductor, root_number)?;
            let text = format!("{}  (rank guess {})", fmt_sig10(r), r.round() as i64);
            Ok(text_value(
                "ec-rank",
                text,
                json!({ "s": s, "estimate": r, "rounded": r.round() as i64 }),
            ))
        }
    }
}
