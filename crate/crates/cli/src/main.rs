//! `kwise`: exact extremal k-wise independent distributions from the
//! command line.
//!
//! Exit status: 0 on success, 1 on a domain or input error, 2 when a
//! verification ran and failed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kwise::boolfn::{fourier, fourier_mass_by_level, parse_function_spec};
use kwise::codes::{dual_and_strength, gv_greedy, nc_upper_construct, oa_distribution, read_code, write_code};
use kwise::dist::{
    block_product, combine_uuv, fourier_strength, independence_strength, independence_strength_definitional,
    qary_to_binary, read_distribution, tree_construction, xor_parity, AtomicDistribution, DistributionFile,
};
use kwise::extremal::{
    epsilon, k_of_eps, nc_scan, read_certificate, solve, verify_certificate, write_certificate, CertificateFile,
    Direction, Method,
};
use kwise::moments::{
    and_upper_bound, closed_m2, closed_m3, code_lower_bounds, deviation_bound, nc_lower_bound,
    nc_upper_bound_formula, rao_bound, rho, small_p_exact, xor0_majority_deviation, xor0_majority_lower,
    DeviationKind, DEFAULT_NC_CONSTANT,
};
use kwise::rational::{fmt_rational, parse_rational, Enclosure};
use kwise::sweep::{epsilon_sweep, nc_sweep, to_csv, to_json, SweepSpec};
use kwise::{Error, Rational};

#[derive(Parser)]
#[command(name = "kwise", version, about = "Exact extremal k-wise independent distributions")]
struct Cli {
    /// Accepted for scripting compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize or minimize P(f = 1) over k-wise independent laws.
    Extremal(ExtremalArgs),
    /// The spread max - min, or the strength needed for a target spread.
    Epsilon(EpsilonArgs),
    /// A grid of epsilon or critical-size computations as JSON or CSV.
    Sweep(SweepArgs),
    /// Evaluate a closed-form bound.
    Bound(BoundArgs),
    /// Build a k-wise independent distribution or a code.
    Construct(ConstructArgs),
    /// Check a distribution, certificate or code file.
    Verify(VerifyArgs),
    /// Fourier mass by level of a function, or Fourier strength of a law.
    Fourier(FourierArgs),
    /// Smallest n with a k-wise independent law avoiding all ones.
    Nc(NcArgs),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `2,4,6` or the inclusive range `1-5`.
fn int_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("`{v}` is not an integer"));
        match part.split_once('-') {
            Some((a, b)) => out.extend(parse(a)?..=parse(b)?),
            None => out.push(parse(part)?),
        }
    }
    Ok(out)
}

#[derive(Args)]
struct ExtremalArgs {
    /// Function spec, e.g. `and:n=3`, `maj2:m=3`, `table:@f.json`.
    #[arg(short = 'f', long = "function")]
    function: String,
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 'p', value_parser = rational)]
    p: Rational,
    #[arg(long = "dir", default_value = "max")]
    direction: Direction,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Write the optimal law here, in the distribution file format.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Write the dual certificate here.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct EpsilonArgs {
    #[arg(short = 'f', long = "function")]
    function: String,
    #[arg(short = 'k', required_unless_present = "target")]
    k: Option<usize>,
    #[arg(short = 'p', value_parser = rational)]
    p: Rational,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Report the least k whose spread is below this value instead.
    #[arg(long, value_parser = rational)]
    target: Option<Rational>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Epsilon,
    Nc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "epsilon")]
    kind: SweepKind,
    /// Function specs for epsilon sweeps, separated by spaces or `;`.
    #[arg(long, default_value = "")]
    functions: String,
    /// Strengths: `2,4,6` or `1-5`.
    #[arg(short = 'k', value_parser = int_list)]
    k: Vec<Vec<usize>>,
    /// Marginals: `1/2,1/3`.
    #[arg(short = 'p', value_parser = rational, value_delimiter = ',')]
    p: Vec<Rational>,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Largest n scanned by critical-size sweeps.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

fn split_specs(s: &str) -> Vec<String> {
    let sep = if s.contains(';') { ';' } else { ' ' };
    s.split(sep).map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect()
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundName {
    /// Minimum rows of a strength-k array (`-n -k -q`).
    Rao,
    /// Upper bounds on the all-ones probability (`-n -k -p`).
    AndUpper,
    ClosedM2,
    ClosedM3,
    /// `p^k`, exact for small p (`-n -k -p`).
    SmallP,
    /// Lower bound on the critical size (`-k -p`).
    NcLower,
    /// Upper bound formula for the critical size (`-k -p [--c]`).
    NcUpper,
    /// Code-based lower bounds on the all-ones probability (`-n -k -p`).
    CodeLower,
    /// Majority deviation bound (`-k`).
    MajDeviation,
    /// Tribes spread bound (`-k`).
    TribesDeviation,
    /// Majority deviation under the even-parity law, exact and stated lower bound (`-n`).
    Xor0Maj,
    /// Largest single-count mass sharing 2m moments (`-n -p -m -x`).
    Rho,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(value_enum)]
    name: BoundName,
    #[arg(short = 'n')]
    n: Option<usize>,
    #[arg(short = 'k')]
    k: Option<usize>,
    #[arg(short = 'p', value_parser = rational)]
    p: Option<Rational>,
    #[arg(short = 'q')]
    q: Option<u64>,
    #[arg(short = 'm')]
    m: Option<usize>,
    #[arg(short = 'x')]
    x: Option<usize>,
    /// Constant in the critical-size upper bound.
    #[arg(long, value_parser = rational)]
    c: Option<Rational>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Uniform law on words of one parity (strength n-1).
    Xor {
        #[arg(short = 'n')]
        n: usize,
        /// 1 for odd parity.
        #[arg(long, default_value_t = 0)]
        parity: u8,
    },
    /// Independent blocks of even-parity laws (pairwise independent witness for Maj of Maj).
    BlockXor {
        #[arg(short = 'm')]
        m: usize,
        #[arg(short = 'l')]
        l: usize,
    },
    /// Combine laws X_i (strength k) with jointly l-wise independent Y blocks.
    Combine {
        #[arg(long = "x", required = true)]
        x: Vec<PathBuf>,
        #[arg(long = "y")]
        y: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 'l', default_value_t = 1)]
        l: usize,
    },
    /// Map a uniform r-ary law to bits: a symbol in the set gives 1.
    Binary {
        #[arg(long)]
        dist: PathBuf,
        /// Symbols mapped to 1, e.g. `0` or `1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        one: Vec<u64>,
    },
    /// Recursive construction on the d-ary tree.
    Tree {
        #[arg(short = 'd')]
        d: usize,
        #[arg(long)]
        levels: usize,
        #[arg(short = 'r', default_value_t = 2)]
        r: u32,
        #[arg(short = 'k')]
        k: usize,
    },
    /// Greedy Gilbert-Varshamov code, written in the code file format.
    Gv {
        #[arg(short = 'q')]
        q: u64,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: usize,
    },
    /// Bits from the dual of a code, viewed as an orthogonal array.
    Oa {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        one: Vec<u64>,
    },
    /// Greedy strength-k law with p = 1 - 1/q and no all-ones mass.
    Nc {
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 'q')]
        q: u64,
        #[arg(long)]
        max_n: Option<usize>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// A distribution, certificate or code file.
    file: PathBuf,
    /// Function the certificate is for (certificate files only).
    #[arg(short = 'f', long = "function")]
    function: Option<String>,
}

#[derive(Args)]
struct FourierArgs {
    #[arg(short = 'f', long = "function", conflicts_with = "dist", required_unless_present = "dist")]
    function: Option<String>,
    /// A uniform binary law whose strength is read from its Fourier spectrum.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Also list the nonzero coefficients.
    #[arg(long)]
    coefficients: bool,
}

#[derive(Args)]
struct NcArgs {
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 'p', value_parser = rational)]
    p: Rational,
    #[arg(long)]
    max_n: Option<usize>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_distribution(d: &AtomicDistribution, out: Option<&Path>) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(&DistributionFile::from_distribution(d))? + "\n"))
}

fn run_extremal(a: &ExtremalArgs) -> Result<()> {
    let f = parse_function_spec(&a.function)?;
    let r = solve(&f, a.k, &a.p, a.direction, a.method)?;
    println!("value {}", fmt_rational(&r.value));
    println!("method {}", r.method);
    if let Some(path) = &a.witness {
        let w = r.witness.to_atomic(a.k)?;
        emit_distribution(&w, Some(path))?;
        let back = read_distribution(path)?;
        if independence_strength(&back)? < a.k || kwise::dist::expectation(&back, &f)? != r.value {
            return Err(Error::Verification("witness does not re-verify after writing".into()).into());
        }
        println!("witness {}", path.display());
    }
    if let Some(path) = &a.certificate {
        let file = CertificateFile::from_result(&r)?;
        write_certificate(&file, path)?;
        let mut c = read_certificate(path)?.to_certificate()?;
        // a one-sided certificate: pair it with the trivial other side
        let trivial = r.certificate();
        match a.direction {
            Direction::Max => c.lower = trivial.lower,
            Direction::Min => c.upper = trivial.upper,
        }
        verify_certificate(&c, &f, &a.p)?;
        println!("certificate {}", path.display());
    }
    Ok(())
}

fn run_epsilon(a: &EpsilonArgs) -> Result<()> {
    let f = parse_function_spec(&a.function)?;
    if let Some(target) = &a.target {
        println!("k {}", k_of_eps(&f, target, &a.p, a.method)?);
        return Ok(());
    }
    let k = a.k.context("-k is required")?;
    let e = epsilon(&f, k, &a.p, a.method)?;
    let gap = verify_certificate(&e.certificate()?, &f, &a.p)?;
    if gap != e.epsilon {
        return Err(Error::Verification("certificate gap differs from the spread".into()).into());
    }
    println!("max {}", fmt_rational(&e.max.value));
    println!("min {}", fmt_rational(&e.min.value));
    println!("epsilon {}", fmt_rational(&e.epsilon));
    Ok(())
}

fn run_sweep(a: &SweepArgs) -> Result<()> {
    let ks: Vec<usize> = a.k.iter().flatten().copied().collect();
    let ps = a.p.clone();
    if ks.is_empty() || ps.is_empty() {
        bail!("a sweep needs at least one -k and one -p value");
    }
    let text = match a.kind {
        SweepKind::Epsilon => {
            let functions = split_specs(&a.functions);
            if functions.is_empty() {
                bail!("an epsilon sweep needs --functions");
            }
            let rows = epsilon_sweep(&SweepSpec { functions, ks, ps, method: a.method })?;
            match a.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            }
        }
        SweepKind::Nc => {
            let rows = nc_sweep(&ks, &ps, a.max_n)?;
            match a.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            }
        }
    };
    emit(a.out.as_deref(), &text)
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().with_context(|| format!("this bound needs {flag}"))
}

fn exact(v: &Rational) -> Value {
    json!(fmt_rational(v))
}

fn enclosure(e: &Enclosure) -> Value {
    json!({"lo": fmt_rational(&e.lo), "hi": fmt_rational(&e.hi)})
}

fn run_bound(a: &BoundArgs) -> Result<()> {
    let mut params = BTreeMap::new();
    let mut put = |key: &str, v: String| {
        params.insert(key.to_string(), v);
    };
    let (name, value) = match a.name {
        BoundName::Rao => {
            let (n, k, q) = (need(&a.n, "-n")?, need(&a.k, "-k")?, need(&a.q, "-q")?);
            put("n", n.to_string());
            put("k", k.to_string());
            put("q", q.to_string());
            ("rao", exact(&rao_bound(n, k, q)?))
        }
        BoundName::AndUpper => {
            let (n, k, p) = (need(&a.n, "-n")?, need(&a.k, "-k")?, need(&a.p, "-p")?);
            put("n", n.to_string());
            put("k", k.to_string());
            put("p", fmt_rational(&p));
            let b = and_upper_bound(n, k, &p)?;
            let mut v = json!({"main": fmt_rational(&b.main)});
            if let Some(c) = &b.corollary {
                v["corollary"] = enclosure(c);
            }
            if let Some(t) = &b.ten_pn {
                v["ten_pn"] = exact(t);
            }
            ("and_upper", v)
        }
        BoundName::ClosedM2 | BoundName::ClosedM3 => {
            let (n, p) = (need(&a.n, "-n")?, need(&a.p, "-p")?);
            put("n", n.to_string());
            put("p", fmt_rational(&p));
            if matches!(a.name, BoundName::ClosedM2) {
                ("closed_m2", exact(&closed_m2(n, &p)?))
            } else {
                ("closed_m3", exact(&closed_m3(n, &p)?))
            }
        }
        BoundName::SmallP => {
            let (n, k, p) = (need(&a.n, "-n")?, need(&a.k, "-k")?, need(&a.p, "-p")?);
            put("n", n.to_string());
            put("k", k.to_string());
            put("p", fmt_rational(&p));
            ("small_p", exact(&small_p_exact(n, k, &p)?))
        }
        BoundName::NcLower => {
            let (k, p) = (need(&a.k, "-k")?, need(&a.p, "-p")?);
            put("k", k.to_string());
            put("p", fmt_rational(&p));
            let b = nc_lower_bound(k, &p)?;
            ("nc_lower", json!({"bound": fmt_rational(&b.value), "ceiling": b.ceiling}))
        }
        BoundName::NcUpper => {
            let (k, p) = (need(&a.k, "-k")?, need(&a.p, "-p")?);
            let c = a.c.clone().unwrap_or_else(|| Rational::from_integer(DEFAULT_NC_CONSTANT.into()));
            put("k", k.to_string());
            put("p", fmt_rational(&p));
            put("c", fmt_rational(&c));
            ("nc_upper", enclosure(&nc_upper_bound_formula(k, &p, &c)?))
        }
        BoundName::CodeLower => {
            let (n, k, p) = (need(&a.n, "-n")?, need(&a.k, "-k")?, need(&a.p, "-p")?);
            put("n", n.to_string());
            put("k", k.to_string());
            put("p", fmt_rational(&p));
            let b = code_lower_bounds(n, k, &p)?;
            let gv = b.gv.as_ref().map(enclosure).unwrap_or_else(|e| json!({"undefined": e}));
            let bch = b.bch.as_ref().map(exact).unwrap_or_else(|e| json!({"undefined": e}));
            ("code_lower", json!({"gv": gv, "bch": bch}))
        }
        BoundName::MajDeviation | BoundName::TribesDeviation => {
            let k = need(&a.k, "-k")?;
            put("k", k.to_string());
            if matches!(a.name, BoundName::MajDeviation) {
                ("maj_deviation", enclosure(&deviation_bound(DeviationKind::Majority, k)?))
            } else {
                ("tribes_deviation", enclosure(&deviation_bound(DeviationKind::Tribes, k)?))
            }
        }
        BoundName::Xor0Maj => {
            let n = need(&a.n, "-n")?;
            put("n", n.to_string());
            let v = json!({
                "deviation": fmt_rational(&xor0_majority_deviation(n)?),
                "lower": enclosure(&xor0_majority_lower(n)),
            });
            ("xor0_maj", v)
        }
        BoundName::Rho => {
            let (n, p, m, x) = (need(&a.n, "-n")?, need(&a.p, "-p")?, need(&a.m, "-m")?, need(&a.x, "-x")?);
            put("n", n.to_string());
            put("p", fmt_rational(&p));
            put("m", m.to_string());
            put("x", x.to_string());
            ("rho", exact(&rho(n, &p, m, x)?))
        }
    };
    println!("{}", serde_json::to_string(&json!({"name": name, "params": params, "value": value}))?);
    Ok(())
}

fn symbols(v: &[u64]) -> Vec<Vec<u64>> {
    vec![v.to_vec()]
}

fn run_construct(a: &ConstructArgs) -> Result<()> {
    let out = a.out.as_deref();
    let d = match &a.kind {
        ConstructKind::Xor { n, parity } => xor_parity(*n, *parity != 0)?,
        ConstructKind::BlockXor { m, l } => {
            let part = xor_parity(*l, false)?;
            block_product(&vec![part; *m])?
        }
        ConstructKind::Combine { x, y, k, l } => {
            let xs = x.iter().map(|p| read_distribution(p)).collect::<kwise::Result<Vec<_>>>()?;
            combine_uuv(&xs, &read_distribution(y)?, *k, *l)?
        }
        ConstructKind::Binary { dist, one } => qary_to_binary(&read_distribution(dist)?, &symbols(one))?,
        ConstructKind::Tree { d, levels, r, k } => {
            let report = tree_construction(*d, *levels, *r, *k)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            eprintln!("verified strength {}", report.verified_strength);
            eprintln!("expected open paths {}", fmt_rational(&report.expected_paths));
            report.distribution
        }
        ConstructKind::Gv { q, n, d } => {
            let code = gv_greedy(*q, *n, *d)?;
            eprintln!("dimension {}", code.m());
            match out {
                Some(path) => write_code(&code, path)?,
                None => print!("{}", serde_json::to_string_pretty(&kwise::codes::CodeFile::from_generator(&code))? + "\n"),
            }
            return Ok(());
        }
        ConstructKind::Oa { code, one } => {
            let oa = dual_and_strength(&read_code(code)?)?;
            eprintln!("array strength {}", oa.strength);
            oa_distribution(&oa, &symbols(one))?
        }
        ConstructKind::Nc { k, q, max_n } => {
            let c = nc_upper_construct(*k, *q, *max_n)?;
            eprintln!("n {}", c.n);
            c.distribution
        }
    };
    emit_distribution(&d, out)
}

fn run_verify(a: &VerifyArgs) -> Result<()> {
    let text = fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
    if value.get("atoms").is_some() {
        let d = read_distribution(&a.file)?;
        let strength = independence_strength_definitional(&d)?;
        println!("strength {strength}");
        if strength < d.claimed_strength() {
            return Err(Error::Verification(format!(
                "claimed strength {} but only {strength} holds",
                d.claimed_strength()
            ))
            .into());
        }
    } else if value.get("upper").is_some() {
        let spec = a.function.as_deref().context("verifying a certificate needs -f")?;
        let f = parse_function_spec(spec)?;
        let file = read_certificate(&a.file)?;
        let c = file.to_certificate()?;
        let gap = verify_certificate(&c, &f, &file.p)?;
        println!("gap {}", fmt_rational(&gap));
    } else if value.get("generator").is_some() {
        let code = read_code(&a.file)?;
        let oa = dual_and_strength(&code)?;
        println!("dimension {}", code.m());
        println!("dual strength {}", oa.strength);
    } else {
        return Err(Error::Malformed("not a distribution, certificate or code file".into()).into());
    }
    Ok(())
}

fn run_fourier(a: &FourierArgs) -> Result<()> {
    if let Some(path) = &a.dist {
        println!("strength {}", fourier_strength(&read_distribution(path)?)?);
        return Ok(());
    }
    let f = parse_function_spec(a.function.as_deref().context("-f or --dist is required")?)?;
    let spec = fourier(&f)?;
    for (level, mass) in fourier_mass_by_level(&spec).iter().enumerate() {
        println!("level {level} {}", fmt_rational(mass));
    }
    if a.coefficients {
        for (set, c) in spec.nonzero() {
            let vars: Vec<String> = (0..f.n()).filter(|i| set >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
            println!("coefficient {{{}}} {}", vars.join(","), fmt_rational(&c));
        }
    }
    Ok(())
}

fn run_nc(a: &NcArgs) -> Result<()> {
    let scan = nc_scan(a.k, &a.p, a.max_n)?;
    println!("n_c {}", scan.n_c);
    println!("lower_bound {}", scan.lower_bound.ceiling);
    println!("hankel_consistent {}", scan.hankel_consistent());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Extremal(a) => run_extremal(a),
        Command::Epsilon(a) => run_epsilon(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Bound(a) => run_bound(a),
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Fourier(a) => run_fourier(a),
        Command::Nc(a) => run_nc(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let verification = e.downcast_ref::<Error>().is_some_and(Error::is_verification_failure);
            ExitCode::from(if verification { 2 } else { 1 })
        }
    }
}
